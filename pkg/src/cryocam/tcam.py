"""TCAM cells, arrays, search semantics, and energy accounting.

One bit is stored in two FeSQUID+hTron branches in parallel; word rows
share a match line (ML).  Search is a quasi-static resistive solve of
the row network: the only temporal quantity is the hTron switching time
``t_search``.

Encoding convention (fixed; reproduces the match/mismatch truth table):

* stored 1 -> fs1 at negative remnant (high I_C), fs2 at positive;
  stored 0 is the mirror image;
* search 1 -> ht1 gate driven (resistive), ht2 gate off; search 0 the
  mirror; search d drives both gates.

Hence the branch that conducts (gate off) holds the positive-remnant,
low-I_C device exactly when the bit matches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .device_physics import (
    SuperconductorParams,
    ab_critical_current,
    bcs_gap,
    tc_from_polarization,
)
from .errors import ConfigError, DomainError, UnsupportedModeError, UsageError
from .fesquid import FeSquidDevice, critical_current, state_resistance
from .ferroelectric import PreisachModel, drive_voltage, remnant_fraction
from .htron import SUPERCONDUCTING, HtronDevice, apply_drive, channel_resistance

TRITS = ("0", "1", "d")

# HD-mode row network constants: gate-driven branch, matched-bit branch,
# mismatched-bit branch.
R_GATE_OFFSTATE = 50e3
R_MATCH = 1.8e3
R_MISMATCH = 0.9e3
DEFAULT_T_SEARCH = 0.3e-9


@dataclass
class BiasConfig:
    """Array bias currents, write voltage, and search timing."""

    i_rwl_exact: float = 3.2e-6  # A per cell, exact mode (calibrated default)
    i_rwl_hd: float = 5e-6  # A per cell, HD mode
    i_rbl_on: float = 40e-6  # A, asserted search gate current
    v_write: float = 2.0  # V
    t_search: float = DEFAULT_T_SEARCH  # s
    r_fs_exact: float = 900.0  # ohm, conducting FeSQUID in an exact-mode match


@dataclass
class TcamCell:
    fs1: FeSquidDevice
    fs2: FeSquidDevice
    ht1: HtronDevice
    ht2: HtronDevice


@dataclass(frozen=True)
class SearchKey:
    """Search word over {0, 1, d}; must match the array width."""

    trits: str

    def __post_init__(self):
        bad = set(self.trits) - set(TRITS)
        if bad:
            raise UsageError(f"key may only contain 0/1/d, got {sorted(bad)}")

    def __len__(self):
        return len(self.trits)

    @property
    def has_dont_care(self) -> bool:
        return "d" in self.trits


@dataclass(frozen=True)
class MatchLineResult:
    v_ml: float  # V
    n_match: int  # matched-bit count (non-d positions)
    power: float  # W, total RWL current times v_ml
    energy: float  # J, power times t_search


class TcamArray:
    """rows x cols grid of TCAM cells sharing one ML per row.

    Searches are read-only over the stored device states and may run
    concurrently; a write needs exclusive access to the whole array (the
    V/2 scheme touches an entire row and column).
    """

    def __init__(
        self,
        rows: int,
        cols: int,
        fe_model: PreisachModel | None = None,
        sc: SuperconductorParams | None = None,
        t_op: float = 4.0,
        bias: BiasConfig | None = None,
        htron_proto: HtronDevice | None = None,
        r_low_state: float = R_MATCH,
        r_high_state: float = R_MISMATCH,
    ):
        if rows < 1 or cols < 1:
            raise DomainError("array must have at least one row and column")
        self.rows = rows
        self.cols = cols
        self.fe_model = fe_model or PreisachModel()
        self.sc = sc or SuperconductorParams()
        self.t_op = t_op
        self.bias = bias or BiasConfig()
        proto = htron_proto or HtronDevice()

        def make_cell():
            def fs():
                return FeSquidDevice(
                    fe=self.fe_model.initial_state(),
                    sc=self.sc,
                    t_op=self.t_op,
                    r_low_state=r_low_state,
                    r_high_state=r_high_state,
                )

            def ht():
                return HtronDevice(
                    i_g_crit=proto.i_g_crit,
                    i_ch_crit=proto.i_ch_crit,
                    r_off=proto.r_off,
                    t_switch=proto.t_switch,
                )

            return TcamCell(fs1=fs(), fs2=fs(), ht1=ht(), ht2=ht())

        self.cells = [[make_cell() for _ in range(cols)] for _ in range(rows)]

    def saturated_critical_currents(self) -> tuple[float, float]:
        """(I_C,low, I_C,high) of a fully written device at t_op."""
        low = ab_critical_current(
            bcs_gap(self.t_op, tc_from_polarization(+1.0, self.sc)),
            self.t_op,
            self.sc.r_n,
        )
        high = ab_critical_current(
            bcs_gap(self.t_op, tc_from_polarization(-1.0, self.sc)),
            self.t_op,
            self.sc.r_n,
        )
        return low, high

    def read_bit(self, row: int, col: int) -> int:
        """Stored bit from the device states (fs1 negative remnant = 1)."""
        cell = self.cells[row][col]
        return 1 if remnant_fraction(cell.fs1.fe) < 0.0 else 0

    def read_word(self, row: int) -> str:
        return "".join(str(self.read_bit(row, c)) for c in range(self.cols))

    def remnant_signs(self):
        """(rows x cols x 2) tuple snapshot of remnant signs, for tests."""
        return tuple(
            tuple(
                (
                    math.copysign(1.0, remnant_fraction(cell.fs1.fe)),
                    math.copysign(1.0, remnant_fraction(cell.fs2.fe)),
                )
                for cell in row
            )
            for row in self.cells
        )


def _check_write_inequality(array: TcamArray):
    v_w, v_c = array.bias.v_write, array.fe_model.v_c
    if not (0.5 * v_w < v_c < v_w):
        raise ConfigError(
            f"write inequality violated: need V_WRITE/2 < V_C < V_WRITE, "
            f"got V_WRITE={v_w} V, V_C={v_c} V"
        )


def _pulse(fs: FeSquidDevice, v: float):
    drive_voltage(fs.fe, v)
    drive_voltage(fs.fe, 0.0)


def write_bit(array: TcamArray, row: int, col: int, value: int) -> TcamArray:
    """V/2 write of one bit.

    The selected cell's ferroelectrics see the full +/-V_WRITE (fs1
    negative for a 1, fs2 the opposite); half-selected cells in the same
    row or column see half that; everything else sees 0 V.
    """
    if value not in (0, 1):
        raise UsageError(f"bit value must be 0 or 1, got {value!r}")
    _check_write_inequality(array)
    v_w = array.bias.v_write
    v1 = -v_w if value == 1 else v_w
    for r in range(array.rows):
        for c in range(array.cols):
            cell = array.cells[r][c]
            if r == row and c == col:
                _pulse(cell.fs1, v1)
                _pulse(cell.fs2, -v1)
            elif r == row or c == col:
                _pulse(cell.fs1, 0.5 * v1)
                _pulse(cell.fs2, -0.5 * v1)
            else:
                _pulse(cell.fs1, 0.0)
                _pulse(cell.fs2, 0.0)
    return array


def store_word(array: TcamArray, row: int, bits: str) -> TcamArray:
    """Write a whole word into one row, column by column."""
    if len(bits) != array.cols:
        raise UsageError(f"word length {len(bits)} != array width {array.cols}")
    if set(bits) - {"0", "1"}:
        raise UsageError("stored words may only contain 0/1")
    for c, b in enumerate(bits):
        write_bit(array, row, c, int(b))
    return array


def _drive_gates(cell: TcamCell, trit: str, i_rbl_on: float):
    g1 = i_rbl_on if trit in ("1", "d") else 0.0
    g2 = i_rbl_on if trit in ("0", "d") else 0.0
    apply_drive(cell.ht1, g1, 0.0)
    apply_drive(cell.ht2, g2, 0.0)


def _count_matches(array: TcamArray, row: int, key: SearchKey) -> int:
    return sum(
        1
        for c, t in enumerate(key.trits)
        if t != "d" and int(t) == array.read_bit(row, c)
    )


def _row_result(v_ml: float, n_match: int, total_i: float, t_search: float):
    power = total_i * v_ml
    return MatchLineResult(
        v_ml=v_ml, n_match=n_match, power=power, energy=power * t_search
    )


def search_exact(array: TcamArray, key: SearchKey) -> list[MatchLineResult]:
    """Exact-search all rows; v_ml is 0 exactly iff any non-d trit
    mismatches the stored bit (a superconducting branch shorts the ML)."""
    if len(key) != array.cols:
        raise UsageError(f"key length {len(key)} != array width {array.cols}")
    i_rwl = array.bias.i_rwl_exact
    ic_low, ic_high = array.saturated_critical_currents()
    if not (ic_low < i_rwl < ic_high):
        raise ConfigError(
            f"exact mode requires I_C,low < I_RWL < I_C,high: "
            f"I_RWL={i_rwl:.4g} A vs ({ic_low:.4g}, {ic_high:.4g}) A"
        )
    results = []
    for r in range(array.rows):
        g_row = 0.0
        shorted = False
        for c, trit in enumerate(key.trits):
            cell = array.cells[r][c]
            _drive_gates(cell, trit, array.bias.i_rbl_on)
            for ht, fs in ((cell.ht1, cell.fs1), (cell.ht2, cell.fs2)):
                if ht.state == SUPERCONDUCTING:
                    # Gate off: the FeSQUID sees the full cell current.
                    if i_rwl > critical_current(fs):
                        g_row += 1.0 / array.bias.r_fs_exact
                    else:
                        shorted = True
                else:
                    # Gate-driven branch: FeSQUID current stays far below
                    # I_C, so only the channel resistance counts.
                    g_row += 1.0 / channel_resistance(ht)
        v_ml = 0.0 if shorted else (array.cols * i_rwl) / g_row
        results.append(
            _row_result(
                v_ml, _count_matches(array, r, key), array.cols * i_rwl,
                array.bias.t_search,
            )
        )
    return results


def search_hd(array: TcamArray, key: SearchKey) -> list[MatchLineResult]:
    """Hamming-distance search: every cell is resistive and the analog ML
    voltage encodes the matched-bit count (strictly increasing in it)."""
    if len(key) != array.cols:
        raise UsageError(f"key length {len(key)} != array width {array.cols}")
    if key.has_dont_care:
        raise UnsupportedModeError(
            "HD mode does not support don't-care trits; use exact mode"
        )
    i_rwl = array.bias.i_rwl_hd
    _, ic_high = array.saturated_critical_currents()
    if not i_rwl > ic_high:
        raise ConfigError(
            f"HD mode requires I_RWL > I_C,high: I_RWL={i_rwl:.4g} A vs "
            f"I_C,high={ic_high:.4g} A"
        )
    results = []
    for r in range(array.rows):
        g_row = 0.0
        for c, trit in enumerate(key.trits):
            cell = array.cells[r][c]
            _drive_gates(cell, trit, array.bias.i_rbl_on)
            for ht, fs in ((cell.ht1, cell.fs1), (cell.ht2, cell.fs2)):
                if ht.state == SUPERCONDUCTING:
                    # I_RWL exceeds I_C,high, so the conducting FeSQUID is
                    # always resistive at its state resistance.
                    g_row += 1.0 / state_resistance(fs)
                else:
                    g_row += 1.0 / channel_resistance(ht)
        v_ml = (array.cols * i_rwl) / g_row
        results.append(
            _row_result(
                v_ml, _count_matches(array, r, key), array.cols * i_rwl,
                array.bias.t_search,
            )
        )
    return results


def ml_voltage_closed_form(
    n_bits: int,
    n_match: int,
    i_rwl_per_bit: float,
    r_gate: float = R_GATE_OFFSTATE,
    r_match: float = R_MATCH,
    r_mismatch: float = R_MISMATCH,
) -> float:
    """Closed-form HD-mode match-line voltage for an n-bit row."""
    if n_bits < 1:
        raise DomainError(f"n_bits must be >= 1, got {n_bits}")
    if not 0 <= n_match <= n_bits:
        raise DomainError(f"n_match must be in [0, {n_bits}], got {n_match}")
    g = n_bits / r_gate + n_match / r_match + (n_bits - n_match) / r_mismatch
    return (n_bits * i_rwl_per_bit) / g


def invert_ml_voltage_closed_form(
    v_ml: float,
    n_bits: int,
    i_rwl_per_bit: float,
    r_gate: float = R_GATE_OFFSTATE,
    r_match: float = R_MATCH,
    r_mismatch: float = R_MISMATCH,
) -> int:
    """Recover the matched-bit count from an HD-mode ML voltage.

    v_ml is strictly monotone in n_match, so the decode rounds the exact
    algebraic inverse to the nearest feasible integer.
    """
    if v_ml <= 0.0:
        raise DomainError(f"v_ml must be > 0, got {v_ml}")
    g = (n_bits * i_rwl_per_bit) / v_ml
    m = (g - n_bits / r_gate - n_bits / r_mismatch) / (1.0 / r_match - 1.0 / r_mismatch)
    return min(n_bits, max(0, round(m)))


def search_energy(
    result,
    n_bits: int,
    i_rwl_per_bit: float,
    t_search: float = DEFAULT_T_SEARCH,
) -> float:
    """Energy (J) of one row search: n_bits * I_RWL * V_ML * t_search.

    ``result`` may be a MatchLineResult or a bare ML voltage.
    """
    v_ml = getattr(result, "v_ml", result)
    return n_bits * i_rwl_per_bit * v_ml * t_search


def invert_energy_targets(
    binary_avg: float,
    ternary_avg: float,
    t_search: float = DEFAULT_T_SEARCH,
    r_gate: float = R_GATE_OFFSTATE,
) -> tuple[float, float]:
    """Invert the averaged 1-bit search energies to (I_RWL, r_fs).

    Binary average over the four (data, search) cases is E_match/2 (two
    matches, two zero-energy mismatches); the ternary average over six
    cases adds the two don't-cares at E_d = I^2 * (r_gate/2) * t.  From
    E_match = I^2 * (r_fs || r_gate) * t the positive pair is unique.
    """
    if binary_avg <= 0.0 or ternary_avg <= 0.0:
        raise DomainError("energy targets must be > 0")
    e_match = 2.0 * binary_avg
    e_dontcare = 3.0 * ternary_avg - e_match
    if e_dontcare <= 0.0:
        raise ConfigError(
            f"no positive solution: ternary target {ternary_avg:.4g} J too "
            f"small against binary target {binary_avg:.4g} J"
        )
    i_rwl = math.sqrt(e_dontcare / ((r_gate / 2.0) * t_search))
    r_parallel = e_match / (i_rwl * i_rwl * t_search)
    if r_parallel >= r_gate:
        raise ConfigError(
            f"no positive solution: implied match resistance {r_parallel:.4g} "
            f"ohm not below the {r_gate:.4g} ohm gate branch"
        )
    r_fs = 1.0 / (1.0 / r_parallel - 1.0 / r_gate)
    return i_rwl, r_fs


def calibrate_exact_bias(
    array: TcamArray, binary_avg: float, ternary_avg: float
) -> tuple[float, float]:
    """Set the array's exact-mode bias from average-energy targets.

    Returns (i_rwl_exact, r_fs) and stores them in the array's
    BiasConfig after checking the bias sits inside the critical-current
    window.
    """
    i_rwl, r_fs = invert_energy_targets(
        binary_avg, ternary_avg, array.bias.t_search
    )
    ic_low, ic_high = array.saturated_critical_currents()
    if not (ic_low < i_rwl < ic_high):
        raise ConfigError(
            f"calibrated I_RWL={i_rwl:.4g} A falls outside the exact-mode "
            f"window ({ic_low:.4g}, {ic_high:.4g}) A"
        )
    array.bias = replace(array.bias, i_rwl_exact=i_rwl, r_fs_exact=r_fs)
    return i_rwl, r_fs
