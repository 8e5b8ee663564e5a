"""
Experiment Catalog
Registry of the named experiments: CSV columns, handler and default tolerance.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from ddsim.exceptions import ConfigError
from ddsim.experiments import handlers
from ddsim.models.schemas import ExperimentInfo, ExperimentName
from ddsim.utils.config_loader import list_presets


@dataclass(frozen=True)
class ExperimentEntry:
    name: ExperimentName
    description: str
    columns: List[str]
    handler: Callable
    tolerance: Optional[float] = None


EXPERIMENTS: Dict[ExperimentName, ExperimentEntry] = {
    entry.name: entry for entry in [
        ExperimentEntry(
            ExperimentName.FIG1,
            "Shallow pocket: free, pulsed (dt = 0.5) and cut-off Cauchy coherence",
            [
                "t", "p_plus_free", "p_plus_pulsed", "p_plus_cutoff_free",
                "p_plus_free_oracle", "abs_dev", "p_plus_cutoff_oracle", "abs_dev_cutoff",
            ],
            handlers.run_fig1,
            tolerance=1e-4,
        ),
        ExperimentEntry(
            ExperimentName.FIG2,
            "q (+) p^2 decoupling error over (t, n) against its closed form",
            ["t", "n", "eps_sim", "eps_oracle", "abs_dev"],
            handlers.run_fig2,
            tolerance=1e-3,
        ),
        ExperimentEntry(
            ExperimentName.FIG3,
            "Friedrichs-Lee environment excitation phi_{n,t}(s)",
            ["s", "phi_sim", "phi_oracle", "abs_dev"],
            handlers.run_fig3,
            tolerance=1e-12,
        ),
        ExperimentEntry(
            ExperimentName.QP_ERROR,
            "q (+) p: probe-set distance to 1 (x) e^{i(t/2)(q+p)} and its n^-1 fit",
            ["t", "n", "dist_sim", "dist_oracle", "abs_dev"],
            handlers.run_qp_error,
            tolerance=1e-6,
        ),
        ExperimentEntry(
            ExperimentName.Q2P2_LIMIT,
            "q^2 (+) p^2: pulsed state against the n-cycle generator and the oscillator limit",
            ["t", "n", "dist_reference", "dist_oscillator"],
            handlers.run_q2p2_limit,
            tolerance=1e-6,
        ),
        ExperimentEntry(
            ExperimentName.SPIN_BOSON_CONVERGENCE,
            "Spin-boson under the Pauli cycle: self-distance and averaged-generator distance",
            ["t", "n", "self_distance", "dist_averaged", "leakage"],
            handlers.run_spin_boson_convergence,
            tolerance=1e-2,
        ),
        ExperimentEntry(
            ExperimentName.FL_VERDICT,
            "Friedrichs-Lee: evidence that pulsed decoupling fails",
            ["n", "amp_first", "norm_phi", "self_distance"],
            handlers.run_fl_verdict,
        ),
        ExperimentEntry(
            ExperimentName.CUSTOM,
            "Any model, cycle and initial state over a (t, n) sweep; no oracle",
            ["t", "n", "p_plus", "eps_hs", "eps_coherence"],
            handlers.run_custom,
        ),
    ]
}


def get_experiment(name) -> ExperimentEntry:
    try:
        return EXPERIMENTS[ExperimentName(name)]
    except ValueError:
        raise ConfigError(
            f"experiment.name: unknown experiment '{name}', expected one of "
            f"{', '.join(e.value for e in ExperimentName)}"
        )


def list_experiments() -> List[ExperimentInfo]:
    """Registry entries with the matching preset name, if one ships."""
    presets = set(list_presets())
    return [
        ExperimentInfo(
            name=entry.name,
            description=entry.description,
            columns=entry.columns,
            preset=entry.name.value if entry.name.value in presets else None,
        )
        for entry in EXPERIMENTS.values()
    ]
