"""Cost ledgers for the windowed modular exponentiation family.

Two layers with different contracts. ``cost`` evaluates the closed-form
per-repetition model with continuous window counts, which is what window
grid searches and scheme comparisons want. ``exact_cost`` mirrors the
circuit synthesizer window for window, ragged boundary windows included,
and agrees with the metered tally of the built circuit exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .builders import COSET, ModexpConfig
from .numerics import window_count, window_width

# Variant names and their circuit content:
#   original  plain windowed recursion, immediate unlookups
#   opt1      unlookups deferred to one shared fixup block per sweep
#   opt2      selective lookup, skipping the mult=0 rows of every table
#   opt3      direct initial lookup over the low exponent bits
#   opt4      low-depth unary conversion via the fanout tree
#   combined  all four at once
#   sliced_A  sliced adder workspace, trading depth for qubits
#   sliced_B  sliced adder workspace, trading Toffolis within equal qubits
VARIANTS = (
    "original",
    "opt1",
    "opt2",
    "opt3",
    "opt4",
    "combined",
    "sliced_A",
    "sliced_B",
)

_INITIAL_VARIANTS = ("opt3", "combined")


class InvalidVariant(ValueError):
    """Requested variant is not one of VARIANTS."""


@dataclass(frozen=True)
class CostBreakdown:
    """Per-repetition and total costs of one scheme at one parameter point.

    lookup/add/unlookup fields are per lookup-addition; totals follow
    total = adt_factor + reps * (lookup + add + unlookup), with the same
    composition for depth. adt_factor books the one-off initial lookup.
    """

    variant: str
    n: int
    n_e: int
    w_e: int
    w_m: int
    initial_bits: int
    reps: float
    adt_factor: int
    lookup_tofs: float
    add_tofs: float
    unlookup_tofs: float
    lookup_depth: float
    add_depth: float
    unlookup_depth: float
    total_tofs: float
    total_depth: float
    logical_qubits: int


def cost(
    variant: str,
    n: int,
    n_e: int,
    w_e: int,
    w_m: int,
    initial_bits: int = 0,
    *,
    unlookup_constant: float = 3.0,
    coset_pad: int = 0,
    corrected_combined_depth: bool = False,
) -> CostBreakdown:
    """Closed-form cost of one variant.

    The immediate-unlookup cost is booked as unlookup_constant * sqrt(L)
    with L the table size; 3 covers unary conversion plus fixup plus unary
    uncomputation, 2 applies when the uncomputation is free. The adder is
    booked at 2*(n + coset_pad) Toffolis and depth; the default pad of 0
    keeps the headline 2n figure. logical_qubits ledgers the three n-bit
    value registers; workspace and exponent live in the circuit layer.
    """
    if variant not in VARIANTS:
        raise InvalidVariant(f"unknown variant {variant!r}")
    if min(n, n_e, w_e, w_m) < 1:
        raise ValueError("n, n_e, w_e, w_m must be positive")
    if initial_bits < 0 or initial_bits > n_e:
        raise ValueError("initial_bits must lie in [0, n_e]")
    if initial_bits and variant not in _INITIAL_VARIANTS:
        raise ValueError(f"initial_bits only applies to {_INITIAL_VARIANTS}")

    deferred = variant in ("opt1", "combined")
    selective = variant in ("opt2", "combined")
    lowdepth = variant in ("opt4", "combined")

    ell = w_e + w_m
    sqrt_table = 2.0 ** (ell / 2)
    lookup = float(1 << ell)
    add = 2.0 * (n + coset_pad)
    unlookup = unlookup_constant * sqrt_table

    adt = 0
    windowed_bits = n_e
    if initial_bits and variant in _INITIAL_VARIANTS:
        adt = 1 << initial_bits
        windowed_bits = n_e - initial_bits

    if selective:
        lookup -= float(1 << w_e)
    if deferred:
        unlookup = 2.0 * (w_m / n) * (1 << w_e) + (1 << w_m)

    lookup_d, add_d, unlookup_d = lookup, add, unlookup
    if lowdepth and not deferred:
        unlookup_d = sqrt_table + 2.0 * (w_e - 1)
    if lowdepth and deferred:
        # The unary build and teardown happen once per sweep, so their
        # depth amortizes to far below one layer per repetition.
        unlookup_d = 2.0 * (w_m / n) * (w_e - 1) + (1 << w_m)
        if corrected_combined_depth:
            unlookup_d = 2.0 * (w_m / n) * w_e + (1 << w_m)

    qubits = 3 * n
    if variant == "sliced_A":
        qubits -= n // 2
        add_d += n
    if variant == "sliced_B":
        add -= n / 2.0

    reps = 2.0 * n * windowed_bits / (w_m * w_e)
    return CostBreakdown(
        variant=variant,
        n=n,
        n_e=n_e,
        w_e=w_e,
        w_m=w_m,
        initial_bits=initial_bits,
        reps=reps,
        adt_factor=adt,
        lookup_tofs=lookup,
        add_tofs=add,
        unlookup_tofs=unlookup,
        lookup_depth=lookup_d,
        add_depth=add_d,
        unlookup_depth=unlookup_d,
        total_tofs=adt + reps * (lookup + add + unlookup),
        total_depth=adt + reps * (lookup_d + add_d + unlookup_d),
        logical_qubits=qubits,
    )


def per_window_cost(n: int, w_e: int, w_m: int) -> float:
    """Toffolis spent by one exponent window of the recursion: two sweeps
    of n/w_m lookup-additions, with the unlookup booked as unary creation
    plus phase fixup (2^(l/2) each, no uncomputation Toffolis)."""
    ell = w_e + w_m
    unlookup = float((1 << (ell // 2)) + (1 << (ell - ell // 2)))
    return 2.0 * (n / w_m) * (float(1 << ell) + 2.0 * n + unlookup)


def crossover_initial_lookup(n: int, w_e: int, w_m: int, *, max_bits: int = 64) -> int:
    """Initial-lookup width that minimizes total cost.

    Handling k low exponent bits directly costs 2^k and removes k/w_e
    exponent windows, so the objective 2^k + (n_e - k)/w_e * per_window
    has the same argmin as 2^k - k * per_window/w_e for every n_e; the
    best k is independent of the exponent length.
    """
    per_bit = per_window_cost(n, w_e, w_m) / w_e
    best_k = 0
    best_f = 1.0
    for k in range(max_bits + 1):
        f = 2.0**k - k * per_bit
        if f < best_f:
            best_k, best_f = k, f
    return best_k


def grid_best_windows(
    n: int,
    n_e: int,
    variant: str,
    *,
    window_range: range = range(1, 11),
    initial_range: range = range(0, 41),
) -> tuple[int, int, int]:
    """Exhaustive window search minimizing total_tofs.

    Returns (w_e, w_m, initial_bits); ties break lexicographically on that
    triple. initial_range only engages for the variants that take an
    initial lookup.
    """
    if variant not in VARIANTS:
        raise InvalidVariant(f"unknown variant {variant!r}")
    inits = initial_range if variant in _INITIAL_VARIANTS else range(1)
    best: tuple[float, int, int, int] | None = None
    for w_e in window_range:
        for w_m in window_range:
            for nep in inits:
                if nep > n_e:
                    continue
                total = cost(variant, n, n_e, w_e, w_m, nep).total_tofs
                key = (total, w_e, w_m, nep)
                if best is None or key < best:
                    best = key
    assert best is not None
    return best[1], best[2], best[3]


def grid_best_cost(n: int, n_e: int, variant: str) -> CostBreakdown:
    """cost() at the grid_best_windows optimum."""
    w_e, w_m, nep = grid_best_windows(n, n_e, variant)
    return cost(variant, n, n_e, w_e, w_m, nep)


# ---------------------------------------------------------------------------
# Exact layer. This reproduces the synthesizer's planning arithmetic, so it
# must change in lockstep with builders._ModexpEmitter.


@dataclass(frozen=True)
class ExactCost:
    """Gate-exact totals for one ModexpConfig, split by phase."""

    adt_tofs: int
    lookup_tofs: int
    add_tofs: int
    unlookup_tofs: int
    total_tofs: int
    lookup_adds: int
    qubits: int


def exact_cost(cfg: ModexpConfig) -> ExactCost:
    """Predict the metered tally of build_windowed_modexp(cfg).

    total_tofs equals the circuit's counted-gate total and qubits equals
    its allocation high water, for every option subset, adder backend, and
    window shape, divisible or not.
    """
    inst, wp, opts = cfg.inst, cfg.wp, cfg.opts
    nep = opts.initial_lookup_bits
    reduced_bits = inst.exp_bits - nep
    exp_windows = (
        [
            window_width(reduced_bits, wp.exp_window, i)
            for i in range(window_count(reduced_bits, wp.exp_window))
        ]
        if reduced_bits
        else []
    )
    mul_windows = [
        window_width(inst.mod_bits, wp.mul_window, j)
        for j in range(window_count(inst.mod_bits, wp.mul_window))
    ]
    width = cfg.value_width

    adt = (1 << nep) - 1 if nep else 0
    lookup = add = unlookup = 0
    for we in exp_windows:
        for wm in mul_windows:
            ell = we + wm
            lookup += (1 << ell) - ((1 << we) if opts.selective_lookup else 1)
            if cfg.adder == COSET:
                add += 2 * width
            if not opts.deferred_unlookup:
                low = ell // 2
                unlookup += (1 << low) + (1 << (ell - low)) - 2
        if opts.deferred_unlookup:
            unlookup += (1 << we) - 1
            unlookup += sum((1 << wm) - 1 for wm in mul_windows)
    # Each exponent window runs a forward and an inverse sweep.
    lookup, add, unlookup = 2 * lookup, 2 * add, 2 * unlookup

    walk_bits = nep
    unary_bits = 0
    for we in exp_windows:
        for wm in mul_windows:
            walk_bits = max(walk_bits, we + wm)
            if opts.deferred_unlookup:
                unary_bits = max(unary_bits, we)
            else:
                unary_bits = max(unary_bits, (we + wm) // 2)
    qubits = inst.exp_bits + 3 * width + walk_bits + 1
    if exp_windows:
        qubits += 1 << unary_bits
    if opts.lowdepth_unary and unary_bits >= 2:
        qubits += (1 << (unary_bits - 1)) - 1
    if cfg.adder == COSET:
        qubits += 1

    return ExactCost(
        adt_tofs=adt,
        lookup_tofs=lookup,
        add_tofs=add,
        unlookup_tofs=unlookup,
        total_tofs=adt + lookup + add + unlookup,
        lookup_adds=2 * len(exp_windows) * len(mul_windows),
        qubits=qubits,
    )
