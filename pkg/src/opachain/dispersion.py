"""Chromatic-dispersion phase model and rippled-spectrum analysis.

Uncompensated fiber between the source and the readout amplifier makes the
relative phase vary quadratically with optical frequency,

    phi(f) = pi * D * c * ((f0 - f) / f0)^2 + phi0,

with the total second-order dispersion D in ps/nm, the center frequency f0 in
THz and c in nm/ps, so the product is dimensionless.  The resulting spectrum,
normalized to amplified vacuum, ripples between the two variance levels:

    R(f) = r_plus * cos^2(phi(f)) + r_minus * sin^2(phi(f)).

This module synthesizes such spectra, estimates |D| back from the ripple
positions, sizes a compensating fiber, and reports how far from the lock
point the phase stays within a deviation budget.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DesignError, DomainError, InsufficientRipplesError
from .sideband import ratio_from_db

__all__ = [
    "C_NM_PER_PS",
    "DispersionModel",
    "SpectrumTrace",
    "FiberSegment",
    "frequency_thz",
    "wavelength_nm",
    "make_grid",
    "phase_at",
    "spectrum",
    "find_ripple_extrema",
    "estimate_dispersion",
    "segment_dispersion",
    "design_dcf",
    "phase_maintained_band",
    "degradation_phase_dev",
]

C_NM_PER_PS = 2.99792458e5  # exact speed of light; nm/ps, so c/lambda_nm is in THz

# Default analysis window, matching the instrument span used throughout.
DEFAULT_WINDOW_NM = (1500.0, 1590.0)


def frequency_thz(wl_nm):
    """Vacuum wavelength [nm] -> optical frequency [THz]."""
    wl = np.asarray(wl_nm, dtype=float)
    if np.any(wl <= 0.0):
        raise DomainError("wavelengths must be > 0 nm")
    return C_NM_PER_PS / wl


def wavelength_nm(f_thz):
    """Optical frequency [THz] -> vacuum wavelength [nm]."""
    f = np.asarray(f_thz, dtype=float)
    if np.any(f <= 0.0):
        raise DomainError("frequencies must be > 0 THz")
    return C_NM_PER_PS / f


@dataclass(frozen=True)
class DispersionModel:
    """Total second-order dispersion D [ps/nm], center f0 [THz], lock phase [rad]."""

    d_ps_per_nm: float
    f0_thz: float
    phi0_rad: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.d_ps_per_nm):
            raise DomainError(f"dispersion must be finite, got {self.d_ps_per_nm}")
        if not (self.f0_thz > 0.0 and math.isfinite(self.f0_thz)):
            raise DomainError(f"center frequency must be > 0 THz, got {self.f0_thz}")
        if not math.isfinite(self.phi0_rad):
            raise DomainError(f"lock phase must be finite, got {self.phi0_rad}")


@dataclass
class SpectrumTrace:
    """Sampled normalized-intensity spectrum over strictly increasing wavelengths."""

    wavelength_nm: np.ndarray
    values: np.ndarray
    unit: str = "ratio"  # "ratio" or "db"
    resolution_nm: float | None = None
    smoothing_nm: float | None = None
    label: str = ""

    def __post_init__(self):
        wl = np.atleast_1d(np.asarray(self.wavelength_nm, dtype=float))
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        if wl.ndim != 1 or vals.shape != wl.shape or wl.size == 0:
            raise DomainError("trace needs matching 1-d wavelength and value arrays")
        if np.any(wl <= 0.0):
            raise DomainError("trace wavelengths must be > 0 nm")
        if wl.size > 1 and np.any(np.diff(wl) <= 0.0):
            raise DomainError("trace wavelengths must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise DomainError("trace values must be finite")
        if self.unit not in ("ratio", "db"):
            raise DomainError(f"trace unit must be 'ratio' or 'db', got {self.unit!r}")
        if self.unit == "ratio" and np.any(vals <= 0.0):
            raise DomainError("ratio-valued trace must be positive")
        self.wavelength_nm = wl
        self.values = vals

    def __len__(self):
        return self.wavelength_nm.size

    def in_ratio(self):
        """Values as linear ratios regardless of the stored unit."""
        if self.unit == "ratio":
            return self.values.copy()
        return 10.0 ** (self.values / 10.0)

    def in_db(self):
        """Values in dB regardless of the stored unit."""
        if self.unit == "db":
            return self.values.copy()
        return 10.0 * np.log10(self.values)

    def as_unit(self, unit):
        """A copy of the trace converted to ``unit``."""
        vals = self.in_ratio() if unit == "ratio" else self.in_db()
        return SpectrumTrace(self.wavelength_nm.copy(), vals, unit,
                             self.resolution_nm, self.smoothing_nm, self.label)


@dataclass(frozen=True)
class FiberSegment:
    """A fiber span: physical length [m] and signed dispersion rate [ps/nm/m]."""

    length_m: float
    d_ps_per_nm_per_m: float

    def __post_init__(self):
        if not (self.length_m >= 0.0 and math.isfinite(self.length_m)):
            raise DomainError(f"segment length must be >= 0 m, got {self.length_m}")
        if not math.isfinite(self.d_ps_per_nm_per_m):
            raise DomainError("segment dispersion rate must be finite")

    @property
    def dispersion_ps_per_nm(self):
        return self.length_m * self.d_ps_per_nm_per_m


def make_grid(start_nm, stop_nm, step_nm):
    """Inclusive wavelength grid from start to stop in steps of step_nm."""
    if not (step_nm > 0.0):
        raise DomainError(f"grid step must be > 0 nm, got {step_nm}")
    if not (0.0 < start_nm < stop_nm):
        raise DomainError(f"grid needs 0 < start < stop, got [{start_nm}, {stop_nm}]")
    n = int(math.floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1
    return start_nm + step_nm * np.arange(n)


def phase_at(model, f_thz):
    """Dispersion phase [rad] at frequency f [THz]; vectorized over f."""
    f = np.asarray(f_thz, dtype=float)
    if np.any(f <= 0.0):
        raise DomainError("frequency must be > 0 THz")
    detune = (model.f0_thz - f) / model.f0_thz
    phi = math.pi * model.d_ps_per_nm * C_NM_PER_PS * detune**2 + model.phi0_rad
    return float(phi) if np.isscalar(f_thz) else phi


def spectrum(model, levels, grid_nm, unit="ratio", label=""):
    """Synthesize the vacuum-normalized spectrum over a wavelength grid [nm].

    Every value is a convex combination of the two levels, so the trace is
    bounded by [r_minus, r_plus]; ripples appear wherever the dispersion phase
    advances by pi/2 across the grid.
    """
    grid = np.atleast_1d(np.asarray(grid_nm, dtype=float))
    if grid.size == 0:
        raise DomainError("wavelength grid must be nonempty")
    phi = phase_at(model, frequency_thz(grid))
    vals = levels.r_plus * np.cos(phi) ** 2 + levels.r_minus * np.sin(phi) ** 2
    trace = SpectrumTrace(grid, vals, "ratio", label=label)
    return trace if unit == "ratio" else trace.as_unit(unit)


def _smooth(values, window_pts):
    if window_pts <= 1:
        return values
    half = window_pts // 2
    padded = np.concatenate([np.full(half, values[0]), values, np.full(half, values[-1])])
    kernel = np.full(window_pts, 1.0 / window_pts)
    return np.convolve(padded, kernel, mode="valid")


def find_ripple_extrema(trace, smoothing_nm=0.1):
    """Interior local extrema of the (smoothed) trace.

    Returns (wavelengths_nm, kinds) with kind +1 for a maximum and -1 for a
    minimum.  The smoothing window is a centered moving average of the stated
    width; the default matches a 0.1 nm instrument smoothing window.
    """
    vals = trace.in_ratio()
    if len(trace) < 3:
        return np.empty(0), np.empty(0, dtype=int)
    step = float(np.median(np.diff(trace.wavelength_nm)))
    window_pts = max(1, int(round(smoothing_nm / step)))
    if window_pts % 2 == 0:
        window_pts += 1
    vals = _smooth(vals, window_pts)
    left = vals[1:-1] - vals[:-2]
    right = vals[1:-1] - vals[2:]
    is_max = (left > 0.0) & (right > 0.0)
    is_min = (left < 0.0) & (right < 0.0)
    idx = np.nonzero(is_max | is_min)[0] + 1
    kinds = np.where(is_max[idx - 1], 1, -1)
    return trace.wavelength_nm[idx], kinds


def estimate_dispersion(trace, f0_thz, smoothing_nm=0.1):
    """Estimate |D| [ps/nm] from ripple extremum positions.

    Consecutive extrema of the spectrum sit at quarter-period phase steps
    (pi between same-type extrema), so on each side of the center frequency
    the extremum index grows linearly with ((f0 - f)/f0)^2.  A shared-slope
    least-squares over both sides, with one free phase offset per side, gives
    pi*D*c as the slope.  The grid must resolve every ripple; only the
    magnitude of D is observable from a single trace.
    """
    if not (f0_thz > 0.0):
        raise DomainError(f"center frequency must be > 0 THz, got {f0_thz}")
    wl_ext, _ = find_ripple_extrema(trace, smoothing_nm=smoothing_nm)
    f_ext = np.sort(frequency_thz(wl_ext)) if wl_ext.size else np.empty(0)
    f_trace = frequency_thz(trace.wavelength_nm)
    if f_trace.min() < f0_thz < f_trace.max() and f_ext.size:
        # The phase parabola's vertex lies inside the trace, so the trace has
        # a stationary point at f0 that is not a quarter-period ripple
        # extremum; drop the detected extremum closest to the vertex.
        u_all = ((f0_thz - f_ext) / f0_thz) ** 2
        f_ext = np.delete(f_ext, int(np.argmin(u_all)))
    if f_ext.size < 2:
        raise InsufficientRipplesError(
            f"found {f_ext.size} usable extrema; need at least 2 on one side "
            f"of the center"
        )
    u = ((f0_thz - f_ext) / f0_thz) ** 2
    side = f_ext >= f0_thz

    rows_u, rows_m, groups = [], [], []
    for g, mask in enumerate((side, ~side)):
        if not np.any(mask):
            continue
        u_g = np.sort(u[mask])
        rows_u.append(u_g)
        rows_m.append(0.5 * math.pi * np.arange(u_g.size))
        groups.append(np.full(u_g.size, g))
    u_all = np.concatenate(rows_u)
    m_all = np.concatenate(rows_m)
    grp = np.concatenate(groups)
    if max(arr.size for arr in rows_u) < 2:
        raise InsufficientRipplesError(
            "need at least 2 extrema on one side of the center frequency"
        )

    design = [u_all[:, None]]
    for g in sorted(set(grp.tolist())):
        design.append((grp == g).astype(float)[:, None])
    a_mat = np.hstack(design)
    coef, *_ = np.linalg.lstsq(a_mat, m_all, rcond=None)
    slope = coef[0]
    return abs(slope) / (math.pi * C_NM_PER_PS)


def segment_dispersion(segments):
    """Total dispersion [ps/nm] of a chain of fiber segments (additive)."""
    return float(sum(seg.dispersion_ps_per_nm for seg in segments))


def design_dcf(segments, dcf_d_per_nm_per_m, target_residual_ps_per_nm=0.0):
    """Length [m] of compensating fiber leaving the target residual dispersion.

    The compensating fiber's dispersion rate must oppose the excess
    (net - target); a same-sign rate cannot cancel it and raises
    :class:`DesignError`.
    """
    if not (math.isfinite(dcf_d_per_nm_per_m) and dcf_d_per_nm_per_m != 0.0):
        raise DesignError("compensating-fiber rate must be finite and nonzero")
    net = segment_dispersion(segments)
    excess = net - target_residual_ps_per_nm
    if excess == 0.0:
        return 0.0
    length = excess / (-dcf_d_per_nm_per_m)
    if length < 0.0:
        raise DesignError(
            f"compensating rate {dcf_d_per_nm_per_m} ps/nm/m has the same sign as "
            f"the excess dispersion {excess} ps/nm; cannot cancel it"
        )
    return length


def degradation_phase_dev(levels, degrade_db=1.0):
    """Phase deviation [rad] at which the squeezing reading degrades by degrade_db.

    Starting from the squeezed point, mixing in sin^2(dphi) of the
    anti-squeezed level lifts the reading to r_minus * 10^(degrade_db/10);
    this solves for dphi.  Used as the default budget for
    :func:`phase_maintained_band`.
    """
    if not (degrade_db > 0.0):
        raise DomainError(f"degradation must be > 0 dB, got {degrade_db}")
    if levels.r_plus == levels.r_minus:
        return 0.5 * math.pi  # vacuum: no degradation at any phase
    s2 = levels.r_minus * (ratio_from_db(degrade_db) - 1.0) / (levels.r_plus - levels.r_minus)
    if s2 >= 1.0:
        return 0.5 * math.pi
    return math.asin(math.sqrt(s2))


def phase_maintained_band(model, lock_f_thz, max_dev_rad,
                          f_window_thz=None):
    """Contiguous frequency band around the lock point within a phase budget.

    Returns (f_lo, f_hi) [THz]: the maximal interval containing lock_f over
    which |phi(f) - phi(lock_f)| <= max_dev_rad, clipped to ``f_window_thz``
    (default: the frequency span of the 1500-1590 nm window).  For D = 0 the
    phase is flat and the whole window is returned.
    """
    if not (max_dev_rad > 0.0):
        raise DomainError(f"phase budget must be > 0 rad, got {max_dev_rad}")
    if not (lock_f_thz > 0.0):
        raise DomainError(f"lock frequency must be > 0 THz, got {lock_f_thz}")
    if f_window_thz is None:
        f_window_thz = (
            float(frequency_thz(DEFAULT_WINDOW_NM[1])),
            float(frequency_thz(DEFAULT_WINDOW_NM[0])),
        )
    win_lo, win_hi = f_window_thz
    if not (win_lo < win_hi):
        raise DomainError(f"frequency window must be increasing, got {f_window_thz}")

    f0 = model.f0_thz
    dc = abs(model.d_ps_per_nm) * C_NM_PER_PS
    if dc == 0.0:
        return win_lo, win_hi

    v_lock = (lock_f_thz - f0) / f0
    u_lock = v_lock * v_lock
    delta = max_dev_rad / (math.pi * dc)
    v_hi = math.sqrt(u_lock + delta)
    if u_lock <= delta:
        # band crosses the parabola vertex: symmetric about f0
        f_lo, f_hi = f0 * (1.0 - v_hi), f0 * (1.0 + v_hi)
    else:
        v_lo = math.sqrt(u_lock - delta)
        if v_lock >= 0.0:
            f_lo, f_hi = f0 * (1.0 + v_lo), f0 * (1.0 + v_hi)
        else:
            f_lo, f_hi = f0 * (1.0 - v_hi), f0 * (1.0 - v_lo)
    return max(f_lo, win_lo), min(f_hi, win_hi)
