"""Rotating-frame Liouvillian of the driven manifold and steady-state solves.

Rotating frame
--------------
One rotation frequency per ground hyperfine manifold, equal to the optical
frequency addressing it, with a common rotation for all excited levels.  With
exactly two optical frequencies (one per ground manifold) every coupling is
then time independent and the loop phase of the double-lambda contour appears
as static complex amplitudes.  The resulting diagonal, in rad/s:

    ground, lower F:   E(F, m; H) - E0            (E0: zero-field lower-F energy)
    ground, upper F:   E(F, m; H) - E0 - w_00(H) - delta_R
    excited:           E(F_e, m; H) - E_c - Delta_L

where w_00(H) is the 0-0 clock splitting at the field, delta_R the Raman
detuning, Delta_L the optical detuning from the lower excited hyperfine
component (centroid E_c), so two-photon resonance of the working transition
sits exactly at delta_R = 0.

Dissipators (all Lindblad-valid, hence trace preserving and dissipative):
excited decay at gamma_e, either quenched to the unpolarized ground mixture
(default, no coherence transfer) or with dipole branching ratios; optical
coherence dephasing at the effective homogeneous linewidth; ground-state
relaxation toward the unpolarized ground mixture at the single rate Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .atom import AtomSpec, Level, clock_splitting, dipole_element, ground_energy
from .optics import DriveConfig, FieldComponent

__all__ = [
    "DensityMatrix",
    "Liouvillian",
    "SteadyStateError",
    "build_liouvillian",
    "steady_state",
    "evolve",
    "unpolarized_ground",
    "polarization_amplitudes",
    "absorption_coefficient",
    "absorbed_power",
]


class SteadyStateError(RuntimeError):
    """The stationary state is singular or could not be solved accurately."""


@dataclass
class DensityMatrix:
    """Complex Hermitian trace-one state over an explicit level basis."""

    matrix: np.ndarray
    levels: tuple[Level, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def population(self, level: Level) -> float:
        idx = [l.key for l in self.levels].index(level.key)
        return float(self.matrix[idx, idx].real)

    def excited_population(self) -> float:
        return float(sum(
            self.matrix[i, i].real
            for i, l in enumerate(self.levels) if l.manifold == "excited"
        ))

    def validate(self, trace_tol: float = 1e-10, herm_tol: float = 1e-10,
                 psd_tol: float = 1e-9) -> None:
        """Raise unless Hermitian, unit trace, and positive semidefinite."""
        trace = self.matrix.trace()
        if abs(trace - 1.0) > trace_tol:
            raise ValueError(f"trace deviates from one by {abs(trace - 1.0):.2e}")
        defect = np.abs(self.matrix - self.matrix.conj().T).max()
        if defect > herm_tol:
            raise ValueError(f"hermiticity defect {defect:.2e}")
        lowest = float(np.linalg.eigvalsh(self.matrix)[0])
        if lowest < -psd_tol:
            raise ValueError(f"negative eigenvalue {lowest:.2e}")


@dataclass(frozen=True)
class _ChannelPairs:
    """Coupled (ground index, excited index, dipole element) per channel."""

    field_index: int
    pairs: tuple[tuple[int, int, float], ...]


@dataclass
class Liouvillian:
    """Time-independent generator acting on row-major vectorized states."""

    matrix: np.ndarray                  # (d^2, d^2) complex
    hamiltonian: np.ndarray             # (d, d) rotating-frame Hamiltonian
    levels: tuple[Level, ...]
    fields: tuple[FieldComponent, ...]
    channels: tuple[_ChannelPairs, ...]
    gamma_ground: float
    quenching: bool

    @property
    def dim(self) -> int:
        return len(self.levels)


def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1)


def _unvec(x: np.ndarray, d: int) -> np.ndarray:
    return x.reshape(d, d)


def _hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    """-i [H, .] for row-major vectorization."""
    d = h.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def _lindblad_superop(a: np.ndarray) -> np.ndarray:
    """A . A^dag - (1/2){A^dag A, .} for row-major vectorization."""
    d = a.shape[0]
    eye = np.eye(d)
    ada = a.conj().T @ a
    return (np.kron(a, a.conj())
            - 0.5 * (np.kron(ada, eye) + np.kron(eye, ada.T)))


class _System:
    """Cached per-(atom, levels, Gamma, quenching) assembly templates.

    The Hamiltonian is linear in (delta_R, Delta_L, channel amplitudes), so
    the superoperator is precomputed as a constant dissipator plus a small
    set of templates; assembling the generator for new drive values is then
    a handful of scaled adds instead of Kronecker products.
    """

    def __init__(self, spec: AtomSpec, levels: tuple[Level, ...],
                 gamma_ground: float, quenching: bool):
        if not levels:
            raise ValueError("empty level list")
        h_gauss = levels[0].field_gauss
        if any(l.field_gauss != h_gauss for l in levels):
            raise ValueError("levels evaluated at inconsistent fields")
        keys = [l.key for l in levels]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate levels")

        self.spec = spec
        self.levels = levels
        self.h_gauss = h_gauss
        self.dim = len(levels)
        self.gamma_ground = gamma_ground
        self.quenching = quenching
        self.ground_idx = [i for i, l in enumerate(levels)
                           if l.manifold == "ground"]
        self.excited_idx = [i for i, l in enumerate(levels)
                            if l.manifold == "excited"]

        f_low, f_high = spec.f_ground
        e0 = ground_energy(spec, f_low, 0, 0.0)
        e_c = -spec.omega_hfs_excited * (spec.f_excited[1].twice + 1) / (
            (spec.f_excited[0].twice + 1) + (spec.f_excited[1].twice + 1))
        if any(l.manifold == "ground" and l.f == f_high for l in levels):
            w00 = clock_splitting(spec, h_gauss)
        else:
            w00 = 0.0

        d = self.dim
        diag0 = np.zeros(d)
        diag_raman = np.zeros(d)    # multiplied by delta_R
        diag_laser = np.zeros(d)    # multiplied by Delta_L
        for i, l in enumerate(levels):
            if l.manifold == "ground":
                diag0[i] = l.energy - e0
                if l.f == f_high:
                    diag0[i] -= w00
                    diag_raman[i] = -1.0
            else:
                diag0[i] = l.energy - e_c
                diag_laser[i] = -1.0
        self._h_diag0 = diag0
        self._h_diag_raman = diag_raman
        self._h_diag_laser = diag_laser
        # a superoperator of a diagonal Hamiltonian is itself diagonal:
        # -i (h_i - h_j) on the (i, j) coherence
        self._l_raman_vec = -1j * np.subtract.outer(diag_raman,
                                                    diag_raman).reshape(-1)
        self._l_laser_vec = -1j * np.subtract.outer(diag_laser,
                                                    diag_laser).reshape(-1)
        self._superop_diag_idx = np.arange(d * d) * (d * d) + np.arange(d * d)
        base = self._build_dissipator()
        base.reshape(-1)[self._superop_diag_idx] += (
            -1j * np.subtract.outer(diag0, diag0).reshape(-1))
        self._base = base

        # channel coupling templates, built lazily per (manifold, q)
        self._coupling_cache: dict[tuple[int, int], tuple] = {}

    def _build_dissipator(self) -> np.ndarray:
        spec, levels, d = self.spec, self.levels, self.dim
        n_g = len(self.ground_idx)
        diss = np.zeros((d * d, d * d), dtype=complex)

        def pop(i, j):
            return i * d + j

        gamma_e = spec.gamma_e
        if self.excited_idx and n_g:
            if self.quenching:
                # uniform transfer of excited population to the ground levels
                for e in self.excited_idx:
                    for g in self.ground_idx:
                        diss[pop(g, g), pop(e, e)] += gamma_e / n_g
                for i in range(d):
                    for j in range(d):
                        n_exc = (i in self.excited_idx) + (j in self.excited_idx)
                        if n_exc:
                            diss[pop(i, j), pop(i, j)] -= 0.5 * gamma_e * n_exc
            else:
                # dipole branching; three polarization jump operators
                s_e = {
                    e: sum(dipole_element(spec, levels[g], levels[e]) ** 2
                           for g in self.ground_idx)
                    for e in self.excited_idx
                }
                for q in (-1, 0, +1):
                    a = np.zeros((d, d))
                    for e in self.excited_idx:
                        if s_e[e] == 0.0:
                            continue
                        for g in self.ground_idx:
                            dge = dipole_element(spec, levels[g], levels[e], q)
                            if dge:
                                a[g, e] = (math.sqrt(gamma_e / s_e[e]) * dge)
                    diss += _lindblad_superop(a)

        # optical coherence dephasing between the manifolds
        gamma_opt = spec.optical_linewidth
        for i in range(d):
            for j in range(d):
                if levels[i].manifold != levels[j].manifold:
                    diss[pop(i, j), pop(i, j)] -= gamma_opt

        # ground relaxation toward the unpolarized ground mixture
        gam = self.gamma_ground
        if gam and n_g:
            for g in self.ground_idx:
                for gp in self.ground_idx:
                    diss[pop(gp, gp), pop(g, g)] += gam / n_g
            for i in range(d):
                for j in range(d):
                    n_grd = (i in self.ground_idx) + (j in self.ground_idx)
                    if n_grd:
                        diss[pop(i, j), pop(i, j)] -= 0.5 * gam * n_grd
        return diss

    def _coupling_templates(self, tf_g: int, q: int):
        key = (tf_g, q)
        if key not in self._coupling_cache:
            spec, levels = self.spec, self.levels
            hbar = spec.constants.hbar
            t = np.zeros((self.dim, self.dim))
            pairs = []
            for gi in self.ground_idx:
                g = levels[gi]
                if g.f.twice != tf_g:
                    continue
                tm_e = g.m.twice + 2 * q
                for ei in self.excited_idx:
                    if levels[ei].m.twice != tm_e:
                        continue
                    dge = dipole_element(spec, g, levels[ei])
                    if dge == 0.0:
                        continue
                    # <e|H|g> = -d_ge E / (2 hbar); E is factored out here
                    t[ei, gi] = -dge / (2.0 * hbar)
                    pairs.append((gi, ei, dge))
            l_re = _hamiltonian_superop(t + t.T)
            l_im = _hamiltonian_superop(1j * (t - t.T))
            # both templates share a sparsity pattern; keep scatter triples
            nz = np.flatnonzero((np.abs(l_re) + np.abs(l_im)).reshape(-1))
            self._coupling_cache[key] = (
                tuple(pairs), nz,
                l_re.reshape(-1)[nz].copy(), l_im.reshape(-1)[nz].copy(),
            )
        return self._coupling_cache[key]

    def assemble(self, fields: tuple[FieldComponent, ...],
                 drive: DriveConfig) -> Liouvillian:
        seen = set()
        for comp in fields:
            ck = (comp.couples_f_g.twice, comp.q)
            if ck in seen:
                raise ValueError(
                    "two field components share a (manifold, polarization) "
                    "channel; no time-independent rotating frame exists"
                )
            seen.add(ck)
            if comp.couples_f_g not in self.spec.f_ground:
                raise ValueError(
                    f"field addresses F = {comp.couples_f_g}, not a ground "
                    "manifold"
                )

        h = np.diag(self._h_diag0
                    + drive.raman_detuning * self._h_diag_raman
                    + drive.laser_detuning * self._h_diag_laser
                    ).astype(complex)
        full = self._base.copy()
        flat = full.reshape(-1)
        flat[self._superop_diag_idx] += (
            drive.raman_detuning * self._l_raman_vec
            + drive.laser_detuning * self._l_laser_vec)
        channels = []
        hbar = self.spec.constants.hbar
        for k, comp in enumerate(fields):
            pairs, nz, vals_re, vals_im = self._coupling_templates(
                comp.couples_f_g.twice, comp.q)
            amp = complex(comp.amplitude)
            if amp != 0:
                flat[nz] += amp.real * vals_re + amp.imag * vals_im
                for gi, ei, dge in pairs:
                    v = -dge * amp / (2.0 * hbar)
                    h[ei, gi] += v
                    h[gi, ei] += np.conj(v)
            channels.append(_ChannelPairs(k, pairs))
        return Liouvillian(full, h, self.levels, tuple(fields),
                           tuple(channels), self.gamma_ground, self.quenching)


@lru_cache(maxsize=16)
def _system(spec: AtomSpec, levels: tuple[Level, ...], gamma_ground: float,
            quenching: bool) -> _System:
    return _System(spec, levels, gamma_ground, quenching)


def build_liouvillian(spec: AtomSpec, levels, fields, drive: DriveConfig,
                      gamma_ground: float,
                      quenching: bool = True) -> Liouvillian:
    """Generator for the given level subset, drive channels and detunings.

    ``levels`` may be the full manifold from :func:`~cptclock.atom.build_levels`
    or any truncation of it (all evaluated at the same field); detunings come
    from ``drive``, amplitudes from ``fields``.
    """
    sys = _system(spec, tuple(levels), float(gamma_ground), bool(quenching))
    return sys.assemble(tuple(fields), drive)


def unpolarized_ground(levels) -> DensityMatrix:
    """Uniform mixture over the ground sublevels of the basis."""
    levels = tuple(levels)
    d = len(levels)
    rho = np.zeros((d, d), dtype=complex)
    ground = [i for i, l in enumerate(levels) if l.manifold == "ground"]
    for i in ground:
        rho[i, i] = 1.0 / len(ground)
    return DensityMatrix(rho, levels)


def steady_state(liouv: Liouvillian) -> DensityMatrix:
    """Unique stationary state of the generator, normalized to unit trace.

    Solves the trace-augmented linear system (the generator plus a weighted
    trace-feedback row), Hermitizes, and verifies the relative residual
    ||L rho|| / (||L|| ||rho||) < 1e-9.
    """
    d = liouv.dim
    mat = liouv.matrix
    weight = max(float(np.abs(mat.diagonal()).mean()), 1.0)
    bordered = mat.copy()
    trace_idx = np.arange(d) * d + np.arange(d)
    bordered[0, trace_idx] += weight
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = weight
    try:
        lu, piv = scipy.linalg.lu_factor(bordered, check_finite=False)
        x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SteadyStateError(
            f"stationary subspace is singular ({exc}); Gamma = 0?"
        ) from exc

    scale = float(np.linalg.norm(mat))

    def finish(x):
        rho = _unvec(x, d)
        rho = 0.5 * (rho + rho.conj().T)
        trace = rho.trace().real
        if not math.isfinite(trace) or abs(trace) < 1e-300:
            raise SteadyStateError("stationary state has vanishing trace")
        rho /= trace
        residual = float(np.linalg.norm(mat @ _vec(rho)))
        return rho, residual / (scale * float(np.linalg.norm(rho)))

    rho, rel = finish(x)
    if rel > 1e-9:
        # one iterative-refinement pass on the bordered system
        x += scipy.linalg.lu_solve((lu, piv), rhs - bordered @ x,
                                   check_finite=False)
        rho, rel = finish(x)
    if not math.isfinite(rel) or rel > 1e-9:
        raise SteadyStateError(
            f"steady-state residual {rel:.2e} exceeds 1e-9; the stationary "
            "subspace may be degenerate (Gamma = 0?)"
        )
    return DensityMatrix(rho, liouv.levels)


def evolve(rho0: DensityMatrix, liouv: Liouvillian, t: float) -> DensityMatrix:
    """exp(L t) applied to the state, by scaling and squaring."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return DensityMatrix(rho0.matrix.copy(), rho0.levels)
    propagator = scipy.linalg.expm(liouv.matrix * t)
    rho = _unvec(propagator @ _vec(rho0.matrix.astype(complex)), liouv.dim)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, liouv.levels)


def _channel_sums(rho: DensityMatrix, spec: AtomSpec, fields):
    """sum d_ge rho_eg per field component, in the order of ``fields``."""
    excited_by_m: dict[int, list[int]] = {}
    for i, l in enumerate(rho.levels):
        if l.manifold == "excited":
            excited_by_m.setdefault(l.m.twice, []).append(i)
    sums = []
    for comp in fields:
        total = 0.0 + 0.0j
        for gi, g in enumerate(rho.levels):
            if g.manifold != "ground" or g.f != comp.couples_f_g:
                continue
            for ei in excited_by_m.get(g.m.twice + 2 * comp.q, ()):
                dge = dipole_element(spec, g, rho.levels[ei])
                if dge:
                    total += dge * rho.matrix[ei, gi]
        sums.append(total)
    return sums


def polarization_amplitudes(rho: DensityMatrix, spec: AtomSpec,
                            fields) -> list[complex]:
    """Complex dipole-density amplitude per channel: P_c = 2 sum d_ge rho_eg.

    The macroscopic polarization of channel c is n * P_c; the field envelope
    obeys dE_c/dz = i (2 pi w / c) n P_c.
    """
    return [2.0 * s for s in _channel_sums(rho, spec, fields)]


def absorbed_power(rho: DensityMatrix, spec: AtomSpec, fields) -> list[float]:
    """Cycle-averaged power absorbed per atom from each channel [erg/s]."""
    out = []
    for comp, s in zip(fields, _channel_sums(rho, spec, fields)):
        out.append(spec.omega_0 * float(np.imag(np.conj(comp.amplitude) * s)))
    return out


def absorption_coefficient(rho: DensityMatrix, spec: AtomSpec, fields,
                           density_cm3: float) -> list[float]:
    """Per-channel intensity absorption coefficient [1/cm].

    ``rho`` must be the steady state for these fields.  Channels with zero
    amplitude report zero.
    """
    if density_cm3 < 0:
        raise ValueError("density must be nonnegative")
    c_light = spec.constants.c
    alphas = []
    for comp, power in zip(fields, absorbed_power(rho, spec, fields)):
        intensity = c_light * abs(comp.amplitude) ** 2 / (8.0 * math.pi)
        if intensity == 0.0:
            alphas.append(0.0)
        else:
            alphas.append(density_cm3 * power / intensity)
    return alphas
