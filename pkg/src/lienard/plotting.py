"""SVG figures of the damping curve and the limit cycles in the Liénard plane."""

from __future__ import annotations

from dataclasses import replace

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .curves import positive_zeros  # noqa: E402
from .dynamics import LienardSystem, half_orbit  # noqa: E402
from .integrator import IntegratorConfig  # noqa: E402

TRACE_MAX_STEP = 0.02


def closed_cycle(system: LienardSystem, y0: float, config: IntegratorConfig | None = None):
    """Points of the full cycle through ``(0, y0)``: the half orbit and its point reflection."""
    cfg = replace(config or IntegratorConfig(), max_step=TRACE_MAX_STEP)
    tr = half_orbit(system, y0, cfg)
    x = np.array([s[1] for s in tr.samples])
    y = np.array([s[2] for s in tr.samples])
    return np.concatenate([x, -x[1:]]), np.concatenate([y, -y[1:]])


def plot_system(system: LienardSystem, cycles=(), path=None, config=None, x_max=None, title=None):
    """Draw ``y = F(x)`` and every cycle; write SVG to ``path`` when given.

    The curve carries the SVG id ``F-curve`` and cycle k the id ``cycle-k``.
    """
    zs = positive_zeros(system.F)
    reach = max([c.amplitude for c in cycles] + zs + [0.5])
    x_max = x_max or 1.25 * reach
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    xs = np.linspace(-x_max, x_max, 1601)
    ax.plot(xs, [system.F(float(v)) for v in xs], color="0.25", lw=1.3, label="y = F(x)", gid="F-curve")
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for c in cycles:
        cx, cy = closed_cycle(system, c.y0, config)
        stab = getattr(c.stability, "value", str(c.stability))
        ax.plot(cx, cy, lw=1.4, color=colors[(c.index - 1) % len(colors)],
                label=f"cycle {c.index} ({stab}), y0={c.y0:.6g}", gid=f"cycle-{c.index}")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.axvline(0.0, color="0.7", lw=0.6)
    ax.set_xlim(-x_max, x_max)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or (system.name or "Liénard system"))
    ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, format="svg")
        plt.close(fig)
        return None
    return fig


def plot_return_map(ys, deltas, path, cycles=()):
    """``P(y0) - y0`` against ``y0`` over the scan grid."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    d = np.clip(np.asarray(deltas, dtype=float), -1.0, 1.0)
    ax.plot(ys, d, lw=1.2, gid="delta")
    ax.axhline(0.0, color="0.6", lw=0.6)
    for c in cycles:
        ax.axvline(c.y0, color="C3", lw=0.8, ls="--")
    ax.set_xlabel("y0")
    ax.set_ylabel("P(y0) - y0 (clipped to ±1)")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
