"""Bundled network data."""

import numpy as np

# Krackhardt (1987) high-tech managers, advice relation: entry [i, j] = 1 when
# manager i+1 reports asking manager j+1 for advice.
_ADVICE_ROWS = """
0 1 0 1 0 0 0 1 0 0 0 0 0 0 0 1 0 1 0 0 1
0 0 0 0 0 1 1 0 0 0 0 0 0 0 0 0 0 0 0 0 1
1 1 0 1 0 1 1 1 1 1 1 1 0 1 0 0 1 1 0 1 1
1 1 0 0 0 1 0 1 0 1 1 1 0 0 0 1 1 1 0 1 1
1 1 0 0 0 1 1 1 0 1 1 0 1 1 0 1 1 1 1 1 1
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1
0 1 0 0 0 1 0 0 0 0 1 1 0 1 0 0 1 1 0 0 1
0 1 0 1 0 1 1 0 0 1 1 0 0 0 0 0 0 1 0 0 1
1 1 0 0 0 1 1 1 0 1 1 1 0 1 0 1 1 1 0 0 1
1 1 1 1 1 0 0 1 0 0 1 0 1 0 1 1 1 1 1 1 0
1 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 1
1 1 0 0 1 0 0 0 1 0 0 0 0 1 0 0 0 1 0 0 0
0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 1 0 0 1
1 1 1 1 1 1 1 1 1 1 1 1 1 1 0 1 1 1 1 1 1
1 1 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 1 0 0 0
1 1 0 1 0 0 1 0 0 0 0 0 0 0 0 0 0 1 0 0 1
1 1 1 1 1 0 1 1 1 1 1 0 1 1 1 1 0 0 1 1 1
1 1 1 0 1 0 1 0 0 1 1 0 0 1 1 0 0 1 0 1 0
1 1 0 0 0 1 0 1 0 0 1 1 0 1 1 1 1 1 0 0 1
0 1 1 1 0 1 1 1 0 0 0 1 0 1 0 0 1 1 0 1 0
"""

KRACKHARDT_ADVICE = np.array(
    [[int(v) for v in row.split()] for row in _ADVICE_ROWS.strip().splitlines()], dtype=np.int8
)
KRACKHARDT_ADVICE.setflags(write=False)

# 0-based indices of the managers who follow the information source
KRACKHARDT_FOLLOWERS = (2, 3, 18, 19)


def krackhardt_weights() -> np.ndarray:
    """Influence weights on the advice relation.

    Manager i is influenced by every manager j who asks i for advice, so the
    influence pattern is the transpose of the advice matrix. Each of the
    Gamma_i incoming ties carries 1/Gamma_i, or 1/(1.125 Gamma_i + 0.155) for
    followers, leaving room for the source weight.
    """
    pattern = KRACKHARDT_ADVICE.T.astype(float)
    gamma = pattern.sum(axis=1)
    if np.any(gamma == 0):
        raise ValueError("every manager needs at least one incoming tie")
    scale = gamma.copy()
    for i in KRACKHARDT_FOLLOWERS:
        scale[i] = 1.125 * gamma[i] + 0.155
    return pattern / scale[:, None]
