"""Monte-Carlo sweeps of the resolvent error statistics against their
envelopes, the dyadic Gamma ladder scan, and envelope-constant fitting.

One eigendecomposition per sampled graph serves the whole z-grid; the
per-z evaluations are vectorized across the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import InsufficientDataError, InvalidParametersError
from .graphs import sample_model
from .rng import stream
from .spectral import (EnvelopeParams, ResolventView, build_H, default_xi,
                       f_envelope, m_semicircle, phi_envelope, psi_envelope)

__all__ = [
    "LawRecord",
    "SweepPlan",
    "law_sweep",
    "records_for_view",
    "dyadic_scan",
    "fit_envelope_constant",
    "write_law_csv",
    "read_law_csv",
    "write_table",
    "read_table",
    "CSV_VERSION",
]

CSV_VERSION = "v1"
_CSV_COLUMNS = ["model", "N", "d", "seed", "trial", "E", "eta", "max_diag_err",
                "max_offdiag", "s_minus_m", "phi", "f_xi_phi", "psi", "flag"]


@dataclass(frozen=True)
class LawRecord:
    """Error statistics and envelope values for one (sample, z) pair."""

    model: str
    N: int
    d: int
    seed: int
    trial: int
    E: float
    eta: float
    max_diag_err: float
    max_offdiag: float
    s_minus_m: float
    phi: float
    f_xi_phi: float
    psi: float
    flag: str = ""


@dataclass(frozen=True)
class SweepPlan:
    """Grid and sampling plan for one sweep."""

    e_grid: tuple[float, ...]
    eta_grid: tuple[float, ...]
    samples: int
    envelope: str = "phi"
    xi: float | None = None
    offdiag_pairs: int = 10000
    eta_floor: float = 1e-8

    def __post_init__(self) -> None:
        if not self.e_grid or not self.eta_grid:
            raise InvalidParametersError("grids must be nonempty")
        if any(eta <= 0 for eta in self.eta_grid):
            raise InvalidParametersError("all eta must be positive")
        if any(eta < self.eta_floor for eta in self.eta_grid):
            raise InvalidParametersError(
                f"eta grid goes below the floor {self.eta_floor}")
        if self.envelope not in ("phi", "psi"):
            raise InvalidParametersError("envelope must be 'phi' or 'psi'")

    @staticmethod
    def dyadic_etas(n: int, eta_min: float, eta_max: float = 1.0) -> tuple[float, ...]:
        """{eta_max * 2^-k} down to the last value >= eta_min."""
        out = []
        eta = float(eta_max)
        while eta >= eta_min:
            out.append(eta)
            eta /= 2
        return tuple(out)


def records_for_view(view: ResolventView, model: str, n: int, d: int,
                     seed: int, trial: int, plan: SweepPlan,
                     params: EnvelopeParams) -> list[LawRecord]:
    """Evaluate all grid points against one decomposed sample."""
    zs = np.array([complex(E, eta) for E in plan.e_grid for eta in plan.eta_grid])
    lam, vec = view.eigenvalues, view.eigenvectors
    weights = 1.0 / (lam[None, :] - zs[:, None])          # (nz, N)
    diag = (vec * vec) @ weights.T                        # (N, nz)
    i_idx, j_idx = view._pair_sample
    off = (vec[i_idx] * vec[j_idx]) @ weights.T           # (P, nz)

    records = []
    for k, z in enumerate(zs):
        m = m_semicircle(z)
        phi = phi_envelope(z, params)
        xi_phi = params.xi * phi
        flags = []
        if params.D < 1:
            flags.append("D<1")
        if xi_phi > 1:
            flags.append("xiPhi>1")
        records.append(LawRecord(
            model=model, N=n, d=d, seed=seed, trial=trial,
            E=float(z.real), eta=float(z.imag),
            max_diag_err=float(np.abs(diag[:, k] - m).max()),
            max_offdiag=float(np.abs(off[:, k]).max()) if off.size else 0.0,
            s_minus_m=float(abs(diag[:, k].mean() - m)),
            phi=float(phi),
            f_xi_phi=float(f_envelope(z, min(1.0, xi_phi))),
            psi=float(psi_envelope(z, params, m)),
            flag=";".join(flags),
        ))
    return records


def law_sweep(plan: SweepPlan, model: str, n: int, d: int,
              seed: int) -> list[LawRecord]:
    """Sample `plan.samples` graphs and evaluate the full grid on each.
    Deterministic given the seed; trial streams are independent."""
    records: list[LawRecord] = []
    xi = default_xi(n) if plan.xi is None else plan.xi
    params = EnvelopeParams.for_model(n, d, model, xi=xi)
    for trial in range(plan.samples):
        rng = stream(seed, trial)
        g = sample_model(model, n, d, rng)
        view = ResolventView(build_H(g, model), offdiag_pairs=plan.offdiag_pairs,
                             pair_seed=seed)
        records.extend(records_for_view(view, model, n, d, seed, trial, plan,
                                        params))
    return records


def dyadic_scan(view: ResolventView, E: float, k_max: int | None = None) -> dict:
    """Gamma along the ladder eta_k = N / 2^k: each halving of eta may at
    most double Gamma, and eta * Gamma must be nondecreasing in eta."""
    n = view.n
    cap = int(4 * math.log2(n))
    k_max = cap if k_max is None else k_max
    if k_max > cap:
        raise InvalidParametersError(f"k_max {k_max} exceeds 4 log2 N = {cap}")
    etas = [n / 2 ** k for k in range(k_max + 1)]
    gammas = [view.gamma(complex(E, eta)) for eta in etas]
    ratios = [gammas[k + 1] / gammas[k] for k in range(len(gammas) - 1)]
    return {
        "E": E,
        "etas": etas,
        "gammas": gammas,
        "ratios": ratios,
        "pass": all(r <= 2.0 + 1e-12 for r in ratios),
    }


def fit_envelope_constant(records: list[LawRecord], xi: float,
                          exclude_flags: tuple[str, ...] = ("D<1",)) -> dict:
    """99th-percentile ratio of each error statistic to its envelope.

    Records carrying any of exclude_flags are dropped; the xiPhi>1 flag is
    informational (its envelope saturates at F = 1) and kept by default.
    """
    usable = [r for r in records
              if not any(f in r.flag.split(";") for f in exclude_flags if f)]
    if not usable:
        raise InsufficientDataError("no usable records after flag filtering")
    diag = np.array([r.max_diag_err / r.f_xi_phi for r in usable])
    off = np.array([r.max_offdiag / (xi * r.phi) for r in usable])
    s = np.array([r.s_minus_m / r.f_xi_phi for r in usable])
    return {
        "C_diag": float(np.percentile(diag, 99)),
        "C_offdiag": float(np.percentile(off, 99)),
        "C_s": float(np.percentile(s, 99)),
        "records_used": len(usable),
    }


# ---------------------------------------------------------------------------
# CSV persistence (schema-versioned; floats via repr for byte stability)

def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path: str, kind: str, columns: list[str], rows: list[list]) -> None:
    """Versioned CSV: '# regg-csv v1 <kind>' header line, then columns."""
    lines = [f"# regg-csv {CSV_VERSION} {kind}", ",".join(columns)]
    lines.extend(",".join(_format(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_table(path: str, kind: str) -> tuple[list[str], list[list[str]]]:
    """Read a versioned CSV of the given kind; rejects other versions."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# regg-csv "):
        raise InvalidParametersError(f"{path}: missing schema header")
    tag = lines[0].split()
    if tag[2] != CSV_VERSION or tag[3] != kind:
        raise InvalidParametersError(f"{path}: unsupported schema {lines[0]!r}")
    columns = lines[1].split(",")
    return columns, [line.split(",") for line in lines[2:] if line]


def write_law_csv(records: list[LawRecord], path: str) -> None:
    rows = [[getattr(r, c) for c in _CSV_COLUMNS] for r in records]
    write_table(path, "law", _CSV_COLUMNS, rows)


def read_law_csv(path: str) -> list[LawRecord]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# regg-csv "):
        raise InvalidParametersError(f"{path}: missing schema header")
    tag = lines[0].split()
    if tag[2] != CSV_VERSION or tag[3] != "law":
        raise InvalidParametersError(f"{path}: unsupported schema {lines[0]!r}")
    if lines[1] != ",".join(_CSV_COLUMNS):
        raise InvalidParametersError(f"{path}: unexpected column header")
    types = {f.name: f.type for f in fields(LawRecord)}
    records = []
    for line in lines[2:]:
        if not line:
            continue
        parts = line.split(",")
        kwargs = {}
        for name, raw in zip(_CSV_COLUMNS, parts):
            t = types[name]
            if t == "int":
                kwargs[name] = int(raw)
            elif t == "float":
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
        records.append(LawRecord(**kwargs))
    return records
