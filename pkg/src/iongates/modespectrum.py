"""Axial normal-mode data for N-ion strings and the mode-order speed limit.

The frequency of the q-th axial mode, in units of the CM frequency, is
nearly independent of how many ions the string holds (good to ~0.5% up to
10 ions in published normal-mode tables), so the ratios are stored as fixed
literals rather than recomputed from the chain potential.

Driving the exchange through a higher mode buys a larger nu_q but costs
Lamb-Dicke headroom: the admissible eta_jq shrinks with the relative gap to
the nearest spectator mode, and the gaps close as q grows.  The net
switching rate therefore *decreases* with mode order; `max_rate` quantifies
this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# nu_q / nu_1 for q = 1..6; q=2 is exactly sqrt(3) for any ion number
MODE_FREQ_RATIOS: tuple[float, ...] = (
    1.0,
    math.sqrt(3.0),
    2.41,
    3.06,
    3.68,
    4.28,
)

N_MODES = len(MODE_FREQ_RATIOS)
# q=6 has no tabulated next-highest neighbour, so its spacing is unknown
MAX_USABLE_ORDER = N_MODES - 1

DEFAULT_BUDGET = 0.01   # epsilon^2 spent on nearest-spectator leakage


def load_mode_frequencies() -> tuple[float, ...]:
    """Mode frequencies relative to the CM mode, q = 1..6."""
    return MODE_FREQ_RATIOS


def _check_order(q: int, max_q: int = MAX_USABLE_ORDER):
    if not isinstance(q, int) or isinstance(q, bool):
        raise TypeError("mode order q must be an integer")
    if not 1 <= q <= max_q:
        raise ValueError(f"mode order q must be in 1..{max_q}, got {q}")


def relative_spacing(q: int) -> float:
    """min_p |nu_p - nu_q| / nu_q over the tabulated spectator modes.

    The minimum is always attained by the next-highest mode, and shrinks
    as q grows.
    """
    _check_order(q)
    nu_q = MODE_FREQ_RATIOS[q - 1]
    gaps = [abs(nu_p - nu_q) / nu_q
            for p, nu_p in enumerate(MODE_FREQ_RATIOS, start=1) if p != q]
    return min(gaps)


def eta_max(q: int, budget: float = DEFAULT_BUDGET) -> float:
    """Largest eta_jq keeping nearest-spectator population loss <= budget.

    Inverts epsilon^2 = (eta_jq nu_q / (2 |nu_p - nu_q|))^2 at the nearest
    spectator: eta_max = 2 sqrt(budget) * min_p |nu_p - nu_q| / nu_q.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    return 2.0 * math.sqrt(budget) * relative_spacing(q)


def max_rate(q: int, budget: float = DEFAULT_BUDGET) -> float:
    """Best exchange Rabi frequency through mode q, in units of nu_1.

    eta_max(q) * nu_q / (2 nu_1): the gain from a faster mode is more than
    eaten by the tighter Lamb-Dicke bound, so this decreases with q.
    """
    return eta_max(q, budget) * MODE_FREQ_RATIOS[q - 1] / 2.0


@dataclass(frozen=True)
class ModeTable:
    """One row per mode order: frequency ratio, nearest relative spacing,
    eta_max and switching-rate ceiling (spacing-derived fields are None for
    the last tabulated mode, whose upper neighbour is unknown)."""

    budget: float
    freq_ratio: tuple[float, ...]
    spacing: tuple[float | None, ...]
    eta_bound: tuple[float | None, ...]
    rate_bound: tuple[float | None, ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(range(1, len(self.freq_ratio) + 1))

    def rows(self) -> list[dict]:
        return [
            {
                "q": q,
                "freq_ratio": self.freq_ratio[q - 1],
                "min_rel_spacing": self.spacing[q - 1],
                "eta_max": self.eta_bound[q - 1],
                "max_rate": self.rate_bound[q - 1],
            }
            for q in self.orders
        ]


def mode_table(budget: float = DEFAULT_BUDGET) -> ModeTable:
    """Assemble the full table at the given leakage budget."""
    spacing = [relative_spacing(q) for q in range(1, MAX_USABLE_ORDER + 1)]
    etas = [eta_max(q, budget) for q in range(1, MAX_USABLE_ORDER + 1)]
    rates = [max_rate(q, budget) for q in range(1, MAX_USABLE_ORDER + 1)]
    pad: list[float | None] = [None]
    return ModeTable(
        budget=budget,
        freq_ratio=MODE_FREQ_RATIOS,
        spacing=tuple(spacing + pad),
        eta_bound=tuple(etas + pad),
        rate_bound=tuple(rates + pad),
    )
