"""
Experiment Handlers
One function per named experiment: build the sweep, run it on the queue,
and turn the results into table rows plus acceptance checks.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from scipy import linalg
from scipy.stats import poisson

from ddsim.constants import (
    FIG1_CUTOFF,
    FIG1_CUTOFF_GRID_POINTS,
    FIG1_PULSE_INTERVAL,
    FIG1_T_MAX,
    FOCK_LEAKAGE_GUARD,
    GRID_MULTIPLE_TOLERANCE,
    QP2_GAMMA,
    QP_ROTATION_ANGLE,
    SHALLOW_POCKET_GAMMA,
)
from ddsim.exceptions import ConfigError, DDSimError, NumericalGuardError
from ddsim.models.schemas import CheckResult, ExperimentConfig, Severity
from ddsim.physics.decoupling import (
    PulseSchedule,
    averaged_generator,
    evolve_free,
    evolve_pulse_train,
    evolve_pulsed,
    parse_cycle,
    pauli_set,
)
from ddsim.physics.friedrichs_lee import (
    MAX_TIME_CELLS,
    cycle_time_step,
    fl_decoupling_verdict,
    fl_weak_convergence_probe,
    make_time_grid,
    pumped_excitation,
)
from ddsim.physics.models import (
    GridModel,
    ModelKind,
    SpinBosonModel,
    SystemState,
    create_model,
    fock_leakage,
    initial_state,
    state_distance,
)
from ddsim.physics.numerics import (
    EnvVector,
    Grid,
    Representation,
    cauchy_state,
    gaussian_state,
    make_grid,
    rotated_state,
)
from ddsim.physics.observables import coherence_error, coherence_plus, decoupling_error, reduce
from ddsim.physics.oracles import (
    eps_qp2,
    harmonic_propagator,
    phi_nt,
    q2p2_reference_propagator,
    qp_limit_apply,
    shallow_pocket_coherence,
    un_qp_error,
)
from ddsim.services.task_queue import SweepQueue


QUBIT_STATES = {
    "plus": np.array([1.0, 1.0]) / np.sqrt(2.0),
    "minus": np.array([1.0, -1.0]) / np.sqrt(2.0),
    "plus_i": np.array([1.0, 1.0j]) / np.sqrt(2.0),
    "zero": np.array([1.0, 0.0]),
    "one": np.array([0.0, 1.0]),
}

MAX_GRID_POINTS = 2 ** 24


@dataclass
class ExperimentResult:
    """Table and verdicts produced by a handler."""
    rows: List[Dict[str, Any]]
    checks: List[CheckResult] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    deviation_columns: Tuple[str, ...] = ()


def _check(name: str, passed: bool, detail: str, severity: Severity = Severity.ERROR) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail, severity=severity)


def qubit_vector(label: str) -> np.ndarray:
    if label not in QUBIT_STATES:
        raise ConfigError(f"model.qubit: unknown qubit state '{label}', expected one of {sorted(QUBIT_STATES)}")
    return QUBIT_STATES[label].astype(complex)


def cauchy_width(config: ExperimentConfig, default: float = QP2_GAMMA) -> float:
    """model.gamma if set, else the experiment default."""
    return config.model.gamma if config.model.gamma is not None else default


def environment_state(config: ExperimentConfig, grid: Grid) -> EnvVector:
    """Environment vector named by model.env."""
    m = config.model
    gamma = cauchy_width(config)
    if m.env == "cauchy_position":
        return cauchy_state(grid, gamma, m.cutoff)
    if m.env == "cauchy_momentum":
        return cauchy_state(grid, gamma, m.cutoff, Representation.MOMENTUM)
    if m.env == "rotated_cauchy":
        return rotated_state(cauchy_state(grid, gamma, m.cutoff), QP_ROTATION_ANGLE)
    if m.env == "gaussian":
        return gaussian_state(grid, center=m.center, width=m.width)
    raise ConfigError(f"model.env: unknown environment state '{m.env}'")


def _grid(config: ExperimentConfig) -> Grid:
    return make_grid(config.grid.L, config.grid.N)


# ===========================================
# fig1: shallow pocket
# ===========================================

def _fig1_times(config: ExperimentConfig) -> List[float]:
    s = config.schedule
    dt = s.dt or FIG1_PULSE_INTERVAL
    t_max = s.t_max or FIG1_T_MAX
    sample = dt / s.samples_per_pulse
    count = int(round(t_max / sample))
    return [k * sample for k in range(count + 1)]


def _cutoff_grid(cutoff: float) -> Grid:
    """Fine grid for the cut-off state; the shallow pocket never leaves position space."""
    return make_grid(2.0 * cutoff, FIG1_CUTOFF_GRID_POINTS)


def run_fig1(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Free, pulsed and cut-off free coherence p_+(t)/p_+(0) of the shallow pocket."""
    m, s = config.model, config.schedule
    dt = s.dt or FIG1_PULSE_INTERVAL
    cutoff = m.cutoff or FIG1_CUTOFF
    gamma = cauchy_width(config, SHALLOW_POCKET_GAMMA)
    grid = _grid(config)
    model = GridModel(ModelKind.SHALLOW_POCKET, grid)
    cut_grid = _cutoff_grid(cutoff)
    cut_model = GridModel(ModelKind.SHALLOW_POCKET, cut_grid)
    cycle = parse_cycle(s.cycle)
    plus = qubit_vector(m.qubit)

    psi_full = initial_state(model, plus, cauchy_state(grid, gamma))
    psi_cut = initial_state(cut_model, plus, cauchy_state(cut_grid, gamma, cutoff))
    p0_full = coherence_plus(reduce(psi_full))
    p0_cut = coherence_plus(reduce(psi_cut))

    def p_free(on: GridModel, t: float, psi: SystemState, p0: float) -> float:
        return coherence_plus(reduce(evolve_free(on, t, psi))) / p0

    def point(params: Dict[str, Any]) -> Dict[str, Any]:
        t = params["t"]
        free = p_free(model, t, psi_full, p0_full)
        pulsed = coherence_plus(reduce(evolve_pulse_train(model, cycle, dt, t, psi_full))) / p0_full
        cut = p_free(cut_model, t, psi_cut, p0_cut)
        oracle = shallow_pocket_coherence(t, gamma)
        cut_oracle = shallow_pocket_coherence(t, gamma, cutoff)
        return {
            "t": t,
            "p_plus_free": free,
            "p_plus_pulsed": pulsed,
            "p_plus_cutoff_free": cut,
            "p_plus_free_oracle": oracle,
            "abs_dev": abs(free - oracle),
            "p_plus_cutoff_oracle": cut_oracle,
            "abs_dev_cutoff": abs(cut - cut_oracle),
        }

    rows = queue.map("fig1", point, [{"t": t} for t in _fig1_times(config)])

    period = dt * len(cycle)
    boundary = [r for r in rows if abs(r["t"] / period - round(r["t"] / period)) < GRID_MULTIPLE_TOLERANCE]
    boundary_dev = max(abs(r["p_plus_pulsed"] - 1.0) for r in boundary)
    free_values = np.array([r["p_plus_free"] for r in rows])
    rises = float(np.max(np.diff(free_values), initial=0.0))

    h = s.derivative_step
    slope_cut = (p_free(cut_model, h, psi_cut, p0_cut) - 1.0) / h
    slope_full = (p_free(model, h, psi_full, p0_full) - 1.0) / h

    checks = [
        _check("pulsed_identity_at_cycle_boundaries", boundary_dev <= 1e-12,
               f"max |p_pulsed - 1| = {boundary_dev:.3e} over {len(boundary)} boundaries"),
        # the window edge adds an oscillation of order rho(L)/t to the decaying tail
        _check("free_decay_monotone", rises <= 1e-8, f"largest increase {rises:.3e}"),
        _check("cutoff_flat_onset", abs(slope_cut) < 1e-4, f"dp/dt(0) = {slope_cut:.3e} with cutoff {cutoff}"),
        _check("uncut_linear_onset", abs(slope_full) >= 1e-4, f"dp/dt(0) = {slope_full:.3e} without cutoff"),
    ]
    summary = {
        "pulse_interval": dt,
        "gamma": gamma,
        "cutoff": cutoff,
        "cutoff_grid_step": cut_grid.dx,
        "slope_at_zero_cutoff": slope_cut,
        "slope_at_zero_uncut": slope_full,
        "boundary_deviation": boundary_dev,
        "cutoff_deviation": max(r["abs_dev_cutoff"] for r in rows),
    }
    return ExperimentResult(rows, checks, summary, deviation_columns=("abs_dev", "abs_dev_cutoff"))


# ===========================================
# fig2: q (+) p^2 decoupling error
# ===========================================

def run_fig2(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Pulsed q (+) p^2 decoupling error against its closed form over a (t, n) sweep."""
    m, s = config.model, config.schedule
    gamma = cauchy_width(config)
    grid = _grid(config)
    model = GridModel(ModelKind.QP2, grid)
    cycle = parse_cycle(s.cycle)
    psi0 = initial_state(model, qubit_vector(m.qubit), environment_state(config, grid))
    rho0 = reduce(psi0)

    def point(params: Dict[str, Any]) -> Dict[str, Any]:
        t, n = params["t"], params["n"]
        rho = reduce(evolve_pulsed(model, PulseSchedule(cycle, t, n), psi0))
        eps_sim = coherence_error(rho)
        eps_oracle = eps_qp2(t, n, gamma)
        return {
            "t": t,
            "n": n,
            "eps_sim": eps_sim,
            "eps_oracle": eps_oracle,
            "abs_dev": abs(eps_sim - eps_oracle),
            "_eps_hs": decoupling_error(rho, rho0),
        }

    params = [{"t": t, "n": n} for t in s.t_values for n in s.n_values]
    rows = queue.map("fig2", point, params)
    hs_gap = max(abs(r.pop("_eps_hs") - r["eps_sim"]) for r in rows)

    # n -> infinity: the error must fall at every fixed t
    falling = all(
        rows[i]["eps_sim"] >= rows[i + 1]["eps_sim"] - 1e-9
        for i in range(len(rows) - 1)
        if rows[i]["t"] == rows[i + 1]["t"]
    )
    checks = [
        _check("error_falls_with_n", falling, "eps(t, n) non-increasing in n at fixed t", Severity.WARNING),
    ]
    summary = {
        "gamma": gamma,
        "cycle": str(cycle),
        "max_gap_hs_vs_coherence": hs_gap,
    }
    return ExperimentResult(rows, checks, summary, deviation_columns=("abs_dev",))


# ===========================================
# fig3 and fl_verdict: Friedrichs-Lee
# ===========================================

def _fl_step(config: ExperimentConfig, n_values: List[int]) -> float:
    fl = config.friedrichs_lee
    return fl.ds if fl.ds is not None else cycle_time_step(fl.t, n_values, fl.cells_per_window)


def run_fig3(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Pumped environment excitation phi_{n,t}(s) against its closed form."""
    fl = config.friedrichs_lee
    n = fl.n_values[0]
    grid = make_time_grid(fl.t, _fl_step(config, [n]))
    state, phi = pumped_excitation(fl.t, n, grid)
    oracle = phi_nt(n, fl.t, grid.centers)

    rows = [
        {"s": float(s), "phi_sim": float(a), "phi_oracle": float(b), "abs_dev": float(abs(a - b))}
        for s, a, b in zip(grid.centers, phi, oracle)
    ]
    expected_amp = float(np.exp(-0.25 * fl.t))
    amp_dev = abs(abs(state.x1) - expected_amp)
    norm_sq = float(np.sum(phi ** 2) * grid.ds)
    checks = [
        _check("first_component_decay", amp_dev <= 1e-10, f"|x1| - e^(-t/4) = {amp_dev:.3e}"),
        # midpoint quadrature of the emitted field loses about ds^2/24
        _check("state_norm", abs(state.norm_squared() - 1.0) <= grid.ds ** 2,
               f"norm^2 - 1 = {state.norm_squared() - 1.0:.3e}, bound ds^2 = {grid.ds ** 2:.3e}"),
    ]
    summary = {"t": fl.t, "n": n, "ds": grid.ds, "norm_phi_sq": norm_sq, "expected_norm_phi_sq": 1.0 - np.exp(-0.5 * fl.t)}
    return ExperimentResult(rows, checks, summary, deviation_columns=("abs_dev",))


def _probe_function(center: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    norm = (np.pi * width ** 2) ** -0.25

    def g(s: np.ndarray) -> np.ndarray:
        return norm * np.exp(-((s - center) ** 2) / (2.0 * width ** 2))

    return g


def run_fl_verdict(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Evidence that pulsed decoupling fails for the Friedrichs-Lee model."""
    fl = config.friedrichs_lee
    n_values = list(fl.n_values)
    ds = _fl_step(config, n_values + [2 * n for n in n_values])
    verdict = fl_decoupling_verdict(fl.t, n_values, ds=ds)
    grid = make_time_grid(fl.t, verdict.ds)
    probe = fl_weak_convergence_probe(n_values, fl.t, _probe_function(fl.probe_center, fl.probe_width), grid)

    rows = [
        {"n": r.n, "amp_first": r.amp_first, "norm_phi": r.norm_phi, "self_distance": r.self_distance}
        for r in verdict.rows
    ]
    probe_values = [value for _, value in probe]
    probe_falls = all(b < a for a, b in zip(probe_values, probe_values[1:]))
    checks = [
        _check("first_component_persists", verdict.amp_persists,
               f"|x1| = e^(-t/4) = {verdict.expected_amp:.12f} for every n"),
        _check("excitation_norm_bounded_below", verdict.norm_bounded_below,
               f"||phi||^2 = 1 - e^(-t/2) = {verdict.expected_norm_phi_sq:.6f} for every n"),
        _check("self_distance_persists", verdict.self_distance_persists,
               f"min ||phi_2n - phi_n|| = {min(r.self_distance for r in verdict.rows):.4f}"),
        _check("weak_probe_falls", probe_falls, f"|<g, phi_n>| = {', '.join(f'{v:.3e}' for v in probe_values)}"),
        _check("weak_probe_small", probe_values[-1] < 0.05, f"|<g, phi>| at n={n_values[-1]}: {probe_values[-1]:.3e}"),
        _check("norm_conserved", max(r.norm_drift for r in verdict.rows) <= verdict.ds ** 2,
               f"max |norm^2 - 1| = {max(r.norm_drift for r in verdict.rows):.3e}, bound ds^2 = {verdict.ds ** 2:.3e}"),
    ]
    summary = {
        "t": fl.t,
        "ds": verdict.ds,
        "decoupling_fails": verdict.decoupling_fails,
        "witness_required_xi1_norm_sq": verdict.witness_required_xi1,
        "witness_observed_xi1_norm_sq": verdict.witness_observed_xi1,
        "weak_probe": {str(n): v for n, v in probe},
    }
    return ExperimentResult(rows, checks, summary)


# ===========================================
# qp_error: q (+) p closed form
# ===========================================

def probe_states(model: GridModel, count: int, seed: int) -> List[SystemState]:
    """Seeded random product states of Gaussian packets and random qubits."""
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(count):
        qubit = rng.normal(size=2) + 1j * rng.normal(size=2)
        qubit /= np.linalg.norm(qubit)
        env = gaussian_state(
            model.grid,
            center=rng.uniform(-4.0, 4.0),
            width=rng.uniform(0.5, 1.5),
            momentum=rng.uniform(-4.0, 4.0),
        )
        states.append(initial_state(model, qubit, env))
    return states


def fit_power_law(n_values: List[int], distances: List[float]) -> tuple:
    """Least-squares fit distance = A n^(-alpha); returns (alpha, A)."""
    slope, intercept = np.polyfit(np.log(n_values), np.log(distances), 1)
    return float(-slope), float(np.exp(intercept))


def run_qp_error(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Probe-set estimate of ||U_n(t) - 1 (x) e^{i(t/2)(q+p)}|| against its closed form."""
    m, s = config.model, config.schedule
    grid = _grid(config)
    model = GridModel(ModelKind.QP, grid)
    cycle = parse_cycle(s.cycle)
    probes = probe_states(model, m.probe_states, config.experiment.seed)

    def point(params: Dict[str, Any]) -> Dict[str, Any]:
        t, n = params["t"], params["n"]
        schedule = PulseSchedule(cycle, t, n)
        dist = max(state_distance(evolve_pulsed(model, schedule, psi), qp_limit_apply(grid, t, psi)) for psi in probes)
        oracle = un_qp_error(t, n)
        return {"t": t, "n": n, "dist_sim": dist, "dist_oracle": oracle, "abs_dev": abs(dist - oracle)}

    rows = queue.map("qp_error", point, [{"t": t, "n": n} for t in s.t_values for n in s.n_values])

    checks = []
    summary: Dict[str, Any] = {"probe_states": m.probe_states, "seed": config.experiment.seed}
    for t in s.t_values:
        if t == 0 or len(s.n_values) < 2:
            continue
        subset = [r for r in rows if r["t"] == t]
        alpha, amplitude = fit_power_law([r["n"] for r in subset], [r["dist_sim"] for r in subset])
        constant = amplitude / t ** 2
        summary[f"t={t}"] = {"exponent": alpha, "constant": constant}
        checks.append(_check(f"exponent_t={t}", abs(alpha - 1.0) <= 0.05, f"fitted exponent {alpha:.4f}"))
        checks.append(_check(f"constant_t={t}", abs(constant / 0.125 - 1.0) <= 0.05,
                             f"fitted C = {constant:.5f}, derived 1/8"))
    return ExperimentResult(rows, checks, summary, deviation_columns=("abs_dev",))


# ===========================================
# q2p2_limit: q^2 (+) p^2 generator and oscillator limit
# ===========================================

def run_q2p2_limit(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Pulsed q^2 (+) p^2 against the n-cycle generator and the oscillator limit."""
    m, s = config.model, config.schedule
    grid = _grid(config)
    model = GridModel(ModelKind.Q2P2, grid)
    cycle = parse_cycle(s.cycle)
    psi0 = initial_state(model, qubit_vector(m.qubit), environment_state(config, grid))
    oscillators = {t: harmonic_propagator(grid, t) for t in s.t_values}

    def point(params: Dict[str, Any]) -> Dict[str, Any]:
        t, n = params["t"], params["n"]
        pulsed = evolve_pulsed(model, PulseSchedule(cycle, t, n), psi0)
        reference = q2p2_reference_propagator(grid, t, n) @ psi0.data.reshape(-1)
        limit = (oscillators[t] @ psi0.data.T).T
        return {
            "t": t,
            "n": n,
            "dist_reference": state_distance(pulsed, psi0.with_data(reference.reshape(2, grid.points))),
            "dist_oscillator": state_distance(pulsed, psi0.with_data(limit)),
        }

    rows = queue.map("q2p2_limit", point, [{"t": t, "n": n} for t in s.t_values for n in s.n_values])

    checks = []
    for t in s.t_values:
        subset = [r["dist_oscillator"] for r in rows if r["t"] == t]
        falling = all(b < a for a, b in zip(subset, subset[1:]))
        checks.append(_check(f"oscillator_limit_t={t}", falling,
                             f"distance to e^(i(t/2)(q^2+p^2)) psi0: {', '.join(f'{d:.3e}' for d in subset)}"))
    return ExperimentResult(rows, checks, {"cycle": str(cycle)}, deviation_columns=("dist_reference",))


# ===========================================
# spin_boson_convergence
# ===========================================

def fock_headroom(coupling: float, t: float, fock_dim: int) -> float:
    """
    Estimated population above level M-3 after time t from the vacuum:
    Poisson tail with mean (coupling t / 2)^2.
    """
    mean = (coupling * t / 2.0) ** 2
    return float(poisson.sf(fock_dim - 3, mean))


def _spin_boson_sweep(config: ExperimentConfig, queue: SweepQueue, fock_dim: int) -> List[Dict[str, Any]]:
    m, s = config.model, config.schedule
    model = create_model(ModelKind.SPIN_BOSON, omega_c=m.omega_c, omega_a=m.omega_a,
                         coupling=m.coupling, fock_dim=fock_dim)
    cycle = parse_cycle(s.cycle)
    psi0 = initial_state(model, qubit_vector(m.qubit), "vacuum")
    h_avg = averaged_generator(model.hamiltonian, pauli_set())

    def point(params: Dict[str, Any]) -> Dict[str, Any]:
        t, n = params["t"], params["n"]
        leak = [fock_leakage(psi0)]

        def observer(_k: int, psi: SystemState) -> None:
            leak.append(fock_leakage(psi))

        psi_n = evolve_pulsed(model, PulseSchedule(cycle, t, n), psi0, observer)
        psi_2n = evolve_pulsed(model, PulseSchedule(cycle, t, 2 * n), psi0, observer)
        averaged = (linalg.expm(1j * t * h_avg) @ psi0.data.reshape(-1)).reshape(2, fock_dim)
        return {
            "t": t,
            "n": n,
            "self_distance": state_distance(psi_n, psi_2n),
            "dist_averaged": state_distance(psi_n, psi0.with_data(averaged)),
            "leakage": max(leak),
        }

    return queue.map("spin_boson_convergence", point, [{"t": t, "n": n} for t in s.t_values for n in s.n_values])


def run_spin_boson_convergence(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Pauli-cycle convergence of the spin-boson model to its averaged generator."""
    m, s = config.model, config.schedule
    fock_dim = m.fock_dim
    doublings = 0
    while True:
        rows = _spin_boson_sweep(config, queue, fock_dim)
        leakage = max(r["leakage"] for r in rows)
        if leakage < FOCK_LEAKAGE_GUARD:
            break
        if 2 * fock_dim > m.max_fock_dim:
            raise NumericalGuardError(
                f"Fock leakage {leakage:.3e} at M={fock_dim} and M cannot grow beyond {m.max_fock_dim}"
            )
        fock_dim *= 2
        doublings += 1

    model = SpinBosonModel(m.omega_c, m.omega_a, m.coupling, fock_dim)
    h_avg = averaged_generator(model.hamiltonian, pauli_set())
    number = np.diag(np.arange(fock_dim, dtype=float))
    generator_residual = float(np.max(np.abs(h_avg - m.omega_c * np.kron(np.eye(2), number))))

    checks = [_check("fock_leakage", leakage < FOCK_LEAKAGE_GUARD, f"max top-two population {leakage:.3e}")]
    for t in s.t_values:
        subset = [r for r in rows if r["t"] == t]
        rates = []
        for a, b in zip(subset, subset[1:]):
            doublings_between = np.log2(b["n"] / a["n"])
            rates.append((a["self_distance"] / b["self_distance"]) ** (1.0 / doublings_between))
        if rates:
            checks.append(_check(f"self_distance_rate_t={t}", min(rates) >= 1.8,
                                 f"reduction per doubling: {', '.join(f'{r:.3f}' for r in rates)}"))
        tolerance = config.experiment.tolerance or 1e-2
        last = subset[-1]["dist_averaged"]
        checks.append(_check(f"averaged_generator_t={t}", last < tolerance,
                             f"||psi_n - e^(it H_avg) psi0|| = {last:.3e} at n={subset[-1]['n']}"))
    summary = {
        "fock_dim": fock_dim,
        "fock_doublings": doublings,
        "averaged_generator_residual": generator_residual,
    }
    return ExperimentResult(rows, checks, summary)


# ===========================================
# custom
# ===========================================

def run_custom(config: ExperimentConfig, queue: SweepQueue) -> ExperimentResult:
    """Pulsed evolution of any model over a (t, n) sweep; no oracle."""
    m, s = config.model, config.schedule
    kind = ModelKind(m.kind)
    cycle = parse_cycle(s.cycle)
    qubit = qubit_vector(m.qubit)
    if kind == ModelKind.SPIN_BOSON:
        model = create_model(kind, omega_c=m.omega_c, omega_a=m.omega_a, coupling=m.coupling, fock_dim=m.fock_dim)
        psi0 = initial_state(model, qubit, "vacuum")
    else:
        grid = _grid(config)
        model = create_model(kind, grid)
        psi0 = initial_state(model, qubit, environment_state(config, grid))
    rho0 = reduce(psi0)

    def point(params: Dict[str, Any]) -> Dict[str, Any]:
        t, n = params["t"], params["n"]
        rho = reduce(evolve_pulsed(model, PulseSchedule(cycle, t, n), psi0))
        return {
            "t": t,
            "n": n,
            "p_plus": coherence_plus(rho),
            "eps_hs": decoupling_error(rho, rho0),
            "eps_coherence": coherence_error(rho),
        }

    rows = queue.map("custom", point, [{"t": t, "n": n} for t in s.t_values for n in s.n_values])
    return ExperimentResult(rows, [], {"model": kind.value, "cycle": str(cycle)})


# ===========================================
# Dry-run prechecks
# ===========================================

def _grid_checks(config: ExperimentConfig) -> List[CheckResult]:
    n = config.grid.N
    return [_check("grid_size", n <= MAX_GRID_POINTS, f"N = {n}, limit {MAX_GRID_POINTS}")]


def _cycle_checks(config: ExperimentConfig) -> List[CheckResult]:
    try:
        cycle = parse_cycle(config.schedule.cycle)
    except DDSimError as e:
        return [_check("cycle", False, str(e))]
    counts = {label: cycle.labels.count(label) for label in sorted(set(cycle.labels))}
    balanced = len(set(counts.values())) == 1
    return [_check("cycle_balanced", balanced, f"element counts {counts}")]


def _fl_checks(config: ExperimentConfig, n_values: List[int]) -> List[CheckResult]:
    fl = config.friedrichs_lee
    try:
        ds = _fl_step(config, n_values)
    except DDSimError as e:
        return [_check("time_step", False, str(e))]
    checks = []
    cells = int(round(fl.t / ds)) + 2
    checks.append(_check("time_window", cells <= MAX_TIME_CELLS, f"{cells} cells of ds = {ds:.3e}"))
    for n in n_values:
        ratio = fl.t / (4.0 * n) / ds
        whole = abs(ratio - round(ratio)) <= GRID_MULTIPLE_TOLERANCE * max(1.0, ratio)
        checks.append(_check(f"window_multiple_n={n}", whole, f"tau/ds = {ratio:.6f} must be an integer"))
        if whole:
            checks.append(_check(f"window_resolution_n={n}", ratio >= fl.cells_per_window,
                                 f"{int(round(ratio))} cells per window, want {fl.cells_per_window}",
                                 Severity.WARNING))
    return checks


def _uses_grid(config: ExperimentConfig) -> bool:
    return config.model.kind is not None and config.model.kind != ModelKind.SPIN_BOSON.value


def precheck(config: ExperimentConfig) -> List[CheckResult]:
    """Preconditions of the configured experiment, without computing anything."""
    name = config.name.value
    s = config.schedule
    checks: List[CheckResult] = []

    if name in ("fig1", "fig2", "qp_error", "q2p2_limit") or (name == "custom" and _uses_grid(config)):
        checks.extend(_grid_checks(config))
    if name in ("fig1", "fig2", "qp_error", "q2p2_limit", "spin_boson_convergence", "custom"):
        checks.extend(_cycle_checks(config))

    if name == "fig1":
        dt = s.dt or FIG1_PULSE_INTERVAL
        t_max = s.t_max or FIG1_T_MAX
        ratio = t_max / (dt / s.samples_per_pulse)
        checks.append(_check("sample_times", abs(ratio - round(ratio)) <= GRID_MULTIPLE_TOLERANCE * max(1.0, ratio),
                             f"t_max / sample step = {ratio:.6f} must be an integer"))
    elif name == "q2p2_limit":
        bad = [(t, n) for t in s.t_values for n in s.n_values if not n > t / 2.0]
        checks.append(_check("generator_domain", not bad, f"pairs with n <= t/2: {bad}" if bad else "n > t/2 everywhere"))
    elif name == "spin_boson_convergence" or (name == "custom" and config.model.kind == ModelKind.SPIN_BOSON.value):
        t_max = max(s.t_values)
        tail = fock_headroom(config.model.coupling, t_max, config.model.fock_dim)
        checks.append(_check("fock_headroom", tail < FOCK_LEAKAGE_GUARD,
                             f"estimated population above level M-3: {tail:.3e}", Severity.WARNING))
    elif name == "fig3":
        checks.extend(_fl_checks(config, config.friedrichs_lee.n_values[:1]))
    elif name == "fl_verdict":
        n_values = list(config.friedrichs_lee.n_values)
        checks.extend(_fl_checks(config, n_values + [2 * n for n in n_values]))

    if name == "custom":
        try:
            ModelKind(config.model.kind)
        except ValueError:
            checks.append(_check("model_kind", False, f"unknown model kind '{config.model.kind}'"))
    return checks
