"""Sweeps behind the command-line subcommands, plus CSV/JSON output."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy import stats

from . import __version__
from . import analytic as an
from . import entanglement as en
from . import fock_algebra as fa
from . import optomech_model as om
from .exceptions import ConvergenceError, NumericalIntegrityError, TruncationError

CONVERGENCE_TOL = 1e-10
PIPELINE_TOL = 1e-10
VALIDATE_TOL = 1e-6
MAX_ORACLE_DIM = 4096
POISSON_TAIL_TOL = 1e-10


def time_grid(t_min: float, t_max: float, points: int) -> np.ndarray:
    if points < 2:
        raise ValueError("points must be >= 2")
    if not t_max > t_min:
        raise ValueError("t_max must exceed t_min")
    return np.linspace(t_min, t_max, points)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    return f"{float(x):.16e}"


def write_csv(path, columns, rows) -> None:
    """Write rows (sequences aligned with ``columns``) with fixed float formatting."""
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])

    if path is None or str(path) == "-":
        import sys
        _write(sys.stdout)
    else:
        with open(path, "w", newline="") as fh:
            _write(fh)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def write_json(path, obj) -> None:
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        import sys
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def manifest(command: str, config: dict, verdicts: dict, measured: dict) -> dict:
    out = {"command": command, "version": __version__,
           "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    out.update(config)
    out.update({f"pass_{k}": bool(v) for k, v in verdicts.items()})
    out.update(measured)
    return out


# -- fig1 ----------------------------------------------------------------

def fig1_rows(kn: float, times, normalize: bool = False):
    """Rows (t, c_paper, c_pipeline[, c_normalized]) of the closed-form curve."""
    rows = []
    for t in times:
        c_paper = float(an.concurrence_closed_form(kn, t))
        rho = an.reduced_density_paper(kn, t)
        c_pipe = en.wootters_concurrence(rho)
        row = [t, c_paper, c_pipe]
        if normalize:
            row.append(en.wootters_concurrence(rho.normalize()))
        if c_paper < 0 or c_pipe < 0 or abs(c_paper - c_pipe) >= PIPELINE_TOL:
            raise NumericalIntegrityError(
                f"closed form {c_paper!r} and density pipeline {c_pipe!r} disagree at t={t}")
        rows.append(row)
    return rows


def fig1_summary(kn: float, rows) -> dict:
    arr = np.array([r[:3] for r in rows], dtype=float)
    i = int(np.argmax(arr[:, 1]))
    expected = an.peak_concurrence(kn)
    return {
        "peak_t": arr[i, 0],
        "peak_value": arr[i, 1],
        "expected_peak_value": expected,
        "peak_abs_error": abs(arr[i, 1] - expected),
        "max_pipeline_gap": float(np.max(np.abs(arr[:, 1] - arr[:, 2]))),
    }


# -- compare -------------------------------------------------------------

@dataclass
class SweepRecord:
    t: float
    c_paper: float
    c_pipeline: float
    c_normalized: float
    c_exact_projected: float
    leakage: float
    fidelity_analytic_vs_exact: float
    fidelity_exact_vs_coherent: float
    method: str = "block"

    def check(self) -> None:
        if self.c_paper < 0 or self.c_pipeline < 0:
            raise NumericalIntegrityError(f"negative concurrence at t={self.t}")
        if abs(self.c_paper - self.c_pipeline) >= PIPELINE_TOL:
            raise NumericalIntegrityError(f"closed form and pipeline disagree at t={self.t}")
        if not 0.0 <= self.leakage <= 1.0:
            raise NumericalIntegrityError(f"leakage {self.leakage} outside [0, 1]")

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return list(asdict(self).values())


def _fidelity(phi: np.ndarray, rho: np.ndarray) -> float:
    phi = phi / np.linalg.norm(phi)
    return float(np.vdot(phi, rho @ phi).real)


def exact_mirror_state(params: om.ModelParams, t: float, trunc: om.Truncation,
                       method: str = "block") -> np.ndarray:
    psi = om.evolve(om.initial_state(params, trunc), params, t, trunc, method=method)
    return om.mirror_density(psi, trunc)


def compare_point(params: om.ModelParams, t: float, trunc: om.Truncation) -> tuple[SweepRecord, en.TwoQubitDensity]:
    kn = params.kn
    rho_paper = an.reduced_density_paper(kn, t)
    rho_m = exact_mirror_state(params, t, trunc)
    q, leak = en.project_to_qubits(rho_m)
    rec = SweepRecord(
        t=float(t),
        c_paper=float(an.concurrence_closed_form(kn, t)),
        c_pipeline=en.wootters_concurrence(rho_paper),
        c_normalized=en.wootters_concurrence(rho_paper.normalize()),
        c_exact_projected=en.wootters_concurrence(q),
        leakage=leak,
        fidelity_analytic_vs_exact=_fidelity(an.approx_state(kn, t).mirror_vector(trunc.n_mirror), rho_m),
        fidelity_exact_vs_coherent=_fidelity(an.coherent_product(kn, t, trunc.n_mirror), rho_m),
    )
    return rec, q


def compare_sweep(params: om.ModelParams, times, trunc: om.Truncation,
                  include_11: bool = False, check_convergence: bool = True):
    """Exact evolution against the closed form on a time grid.

    Returns (records, summary).  The convergence gate recomputes every point
    with doubled mirror truncation and requires the projected concurrence,
    the projected qubit state and the leakage to change by less than
    CONVERGENCE_TOL.
    """
    trunc.check(params)
    fine = om.Truncation(trunc.n_cav, 2 * trunc.n_mirror)
    records = []
    gate_state = gate_c = 0.0
    for t in times:
        rec, q = compare_point(params, t, trunc)
        rec.check()
        records.append(rec)
        if check_convergence:
            rec2, q2 = compare_point(params, t, fine)
            gate_state = max(gate_state, float(np.max(np.abs(q.matrix - q2.matrix))),
                             abs(rec.leakage - rec2.leakage))
            gate_c = max(gate_c, abs(rec.c_exact_projected - rec2.c_exact_projected))
    summary = {
        "max_c_paper": max(r.c_paper for r in records),
        "max_c_exact_projected": max(r.c_exact_projected for r in records),
        "max_leakage": max(r.leakage for r in records),
        "min_fidelity_analytic_vs_exact": min(r.fidelity_analytic_vs_exact for r in records),
        "max_fidelity_gap": 1 - min(r.fidelity_analytic_vs_exact for r in records),
        "min_fidelity_exact_vs_coherent": min(r.fidelity_exact_vs_coherent for r in records),
        "convergence_checked": check_convergence,
        "convergence_max_state_change": gate_state,
        "convergence_max_concurrence_change": gate_c,
    }
    if include_11:
        summary["max_c_extended_pure"] = max(
            en.pure_concurrence(an.approx_state(params.kn, t, include_11=True).amplitudes(), normalized=False)
            for t in times)
    if check_convergence and max(gate_state, gate_c) >= CONVERGENCE_TOL:
        raise ConvergenceError(
            f"doubling n_mirror to {fine.n_mirror} changed the projected concurrence by "
            f"{gate_c:.3e} and the projected state by {gate_state:.3e}")
    return records, summary


# -- validate ------------------------------------------------------------

def validate_report(params: om.ModelParams, trunc: om.Truncation, times, padding: int = 16,
                    kerr_sign: float = 1.0) -> dict:
    """Factorised propagator against the dense expm oracle.

    ``distance_retained`` (gated) compares both operators on the retained
    levels after building them with ``padding`` extra mirror levels;
    ``distance_truncated`` is the raw comparison on the truncated space,
    reported but not gated because it is dominated by the top mirror level.
    """
    big = om.Truncation(trunc.n_cav, trunc.n_mirror + padding)
    if big.space.total_dim > MAX_ORACLE_DIM:
        raise ValueError(f"dense oracle dimension {big.space.total_dim} exceeds {MAX_ORACLE_DIM}")
    exp_small = fa.HermitianPropagator(om.build_hamiltonian(params, trunc))
    exp_big = fa.HermitianPropagator(om.build_hamiltonian(params, big))
    n_small = fa.embed(fa.number(trunc.n_cav), 0, trunc.space)
    per_t = []
    for t in times:
        u_fact = om.factorized_propagator(params, t, trunc, kerr_sign=kerr_sign)
        u_exp = exp_small(t)
        u_fact_big = om.factorized_propagator(params, t, big, kerr_sign=kerr_sign)
        u_exp_big = exp_big(t)
        u_int = om.interaction_propagator(params, t, trunc)
        cav_phase = np.exp(1j * t * params.r * np.diag(n_small).real)
        per_t.append({
            "t": float(t),
            "distance_retained": om.compressed_distance(u_fact_big, u_exp_big, big, trunc.n_mirror),
            "distance_truncated": float(np.linalg.norm(u_fact - u_exp, 2)),
            "unitarity_defect_factorized": fa.unitarity_defect(u_fact),
            "unitarity_defect_expm": fa.unitarity_defect(u_exp),
            "photon_conservation_defect": max(
                float(np.max(np.abs(u_fact @ n_small - n_small @ u_fact))),
                float(np.max(np.abs(u_exp @ n_small - n_small @ u_exp)))),
            "interaction_picture_defect": float(np.max(np.abs(cav_phase[:, None] * u_fact - u_int))),
        })
    gated = ("distance_retained", "unitarity_defect_factorized", "unitarity_defect_expm",
             "photon_conservation_defect", "interaction_picture_defect")
    worst = {key: max(p[key] for p in per_t) for key in gated + ("distance_truncated",)}
    verdicts = {key: worst[key] <= VALIDATE_TOL for key in gated}
    return {"per_t": per_t, "worst": worst, "verdicts": verdicts, "padding": padding,
            "kerr_sign": kerr_sign, "passed": all(verdicts.values())}


# -- coherent ------------------------------------------------------------

def poisson_tail(alpha: complex, n_cav: int) -> float:
    """Weight of a coherent state on levels >= n_cav."""
    mu = abs(alpha) ** 2
    if mu == 0:
        return 0.0
    return float(stats.poisson.sf(n_cav - 1, mu))


def coherent_cavity_dim(alpha: complex, tol: float = POISSON_TAIL_TOL) -> int:
    """Smallest cavity truncation covering |alpha|^2 + 5|alpha| whose tail is below ``tol``."""
    n = max(2, math.ceil(abs(alpha) ** 2 + 5 * abs(alpha)) + 1)
    while poisson_tail(alpha, n) > tol:
        n += 1
    return n


def coherent_report(alpha: complex, k: float, times, trunc: om.Truncation):
    """Mirror entanglement when the cavity starts in a coherent state.

    Returns (rows, report) with rows (t, c_projected, leakage).
    """
    tail = poisson_tail(alpha, trunc.n_cav)
    if tail > POISSON_TAIL_TOL:
        raise TruncationError(
            f"coherent amplitude {alpha} leaves Poisson tail {tail:.3e} above n_cav = {trunc.n_cav}")
    params = om.ModelParams(k=k, n=0)
    cav = fa.coherent_state(trunc.n_cav, alpha)
    psi0 = np.kron(cav, fa.fock_state(trunc.mirror_dim, 0))
    rows = []
    for t in times:
        psi = om.evolve(psi0, params, t, trunc, method="block")
        q, leak = en.project_to_qubits(om.mirror_density(psi, trunc))
        rows.append([float(t), en.wootters_concurrence(q), leak])
    arr = np.array(rows)
    report = {
        "alpha_re": float(np.real(alpha)), "alpha_im": float(np.imag(alpha)), "k": k,
        "n_cav": trunc.n_cav, "n_mirror": trunc.n_mirror, "poisson_tail": tail,
        "max_concurrence": float(arr[:, 1].max()), "max_leakage": float(arr[:, 2].max()),
        "per_t": {"t": arr[:, 0], "concurrence": arr[:, 1], "leakage": arr[:, 2]},
    }
    return rows, report
