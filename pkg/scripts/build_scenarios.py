"""Regenerate the bundled scenario files under src/opinet/scenarios/."""

from pathlib import Path

import numpy as np

from opinet.data import KRACKHARDT_FOLLOWERS, krackhardt_weights
from opinet.network import BiasSpec, NetworkSpec, Source, validate_network
from opinet.scenario import (
    InferenceDefaults,
    Scenario,
    SimulationDefaults,
    Tolerances,
    save_scenario,
)

OUT = Path(__file__).resolve().parents[1] / "src" / "opinet" / "scenarios"

# (i, j, w): individual i is influenced by j, 1-based
TOY12_EDGES = [
    (1, 12, 0.4), (2, 1, 0.5), (3, 2, 0.6), (4, 3, 0.7), (5, 4, 0.1), (5, 7, 0.2),
    (5, 10, 0.3), (6, 5, 0.2), (6, 7, 0.3), (7, 6, 0.5), (7, 11, 0.2), (8, 7, 0.1),
    (8, 10, 0.7), (9, 8, 0.8), (10, 9, 0.6), (11, 10, 0.9), (12, 6, 0.2), (12, 11, 0.5),
]
TOY12_X0 = [0.7513, 0.2551, 0.506, 0.6991, 0.8909, 0.9593, 0.5472, 0.1386, 0.1493, 0.2575, 0.8407, 0.2543]
TOY12_BIAS = {0: (0.5, 0.3), 1: (0.4, 0.2), 2: (0.3, 0.1), 3: (0.2, 0.1)}


def toy12() -> Scenario:
    W = np.zeros((12, 12))
    for i, j, w in TOY12_EDGES:
        W[i - 1, j - 1] = w
    spec = NetworkSpec(
        W,
        (Source(0.0, (0, 1, 2, 3)),),
        {i: BiasSpec.linear(b, g) for i, (b, g) in TOY12_BIAS.items()},
    )
    return Scenario(
        "toy12",
        spec,
        "12 individuals, one information source with opinion 0 followed by "
        "individuals 1-4 under piecewise-linear confirmation bias. Exact "
        "recovery case: the fixed innate opinions make P full rank.",
        np.array(TOY12_X0),
        SimulationDefaults(horizon=30, seed=0, precision="double"),
        InferenceDefaults(problem=1, m=0, p=None, m_max=2, tolerances=Tolerances()),
    )


def krackhardt() -> Scenario:
    W = krackhardt_weights()
    spec = NetworkSpec(
        W,
        (Source(0.5, KRACKHARDT_FOLLOWERS),),
        {
            2: BiasSpec.sin(0.13, 0.13),
            3: BiasSpec.sin(0.125, 0.125),
            18: BiasSpec.log(0.14, 2.0),
            19: BiasSpec.log(0.125, 2.0),
        },
    )
    return Scenario(
        "krackhardt",
        spec,
        "Krackhardt high-tech managers advice network (21 managers). Manager i "
        "is influenced by each manager who asks i for advice; the edge list is "
        "the standard published advice relation (191 ties as transcribed here), "
        "since no other edge list accompanies the experiment. Followers 3, 4, 19 "
        "and 20 are the managers given bias models; their tie weights are "
        "1/(1.125 Gamma_i + 0.155), all others 1/Gamma_i. The source opinion is "
        "0.5. Innate opinions are drawn uniformly per Monte-Carlo sample, and "
        "simulation runs in double-double precision because the windowed P "
        "matrices have condition numbers near 1e29.",
        None,
        SimulationDefaults(horizon=600, seed=1, precision="dd"),
        InferenceDefaults(
            problem=3, m=2, p=30, m_max=2,
            p_sweep=(30, 60, 100, 150, 200, 300, 400),
            tolerances=Tolerances(),
        ),
    )


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for sc in (toy12(), krackhardt()):
        validate_network(sc.spec)
        save_scenario(sc, OUT / f"{sc.name}.json")
        print("wrote", OUT / f"{sc.name}.json")
