"""Sequential products and conditioning of observables.

``(A o B)_(x,y) = A_x^{1/2} B_y A_x^{1/2}`` and ``(B|A)_y = sum_x (A o B)_(x,y)``.
The closed forms for sharp and atomic inputs are kept as separate functions
so they can be checked against the generic square-root route.
"""
from __future__ import annotations

import numpy as np

from . import linalg
from .errors import ConsistencyError, DimMismatch, SpaceMismatch
from .measures import OutcomeSpace, StochasticMatrix, product_space
from .quantum import Observable, atomic_observable, atomic_vectors, is_atomic, post_process


def _check_dims(a: Observable, b: Observable):
    if a.dim != b.dim:
        raise DimMismatch(f"observables act on dimensions {a.dim} and {b.dim}")


def _roots(a: Observable) -> np.ndarray:
    return np.array([linalg.psd_sqrt(e, a.tol) for e in a.effects])


def seq_product(a: Observable, b: Observable) -> Observable:
    _check_dims(a, b)
    roots = _roots(a)
    effects = np.einsum("xij,yjk,xkl->xyil", roots, b.effects, roots)
    return Observable(product_space(a.space, b.space), effects.reshape(-1, a.dim, a.dim), a.tol)


def condition(b: Observable, a: Observable) -> Observable:
    """``b`` conditioned by ``a``: ``(B|A)_y = sum_x A_x^{1/2} B_y A_x^{1/2}``."""
    _check_dims(a, b)
    roots = _roots(a)
    return Observable(b.space, np.einsum("xij,yjk,xkl->yil", roots, b.effects, roots), b.tol)


def seq_with_postprocessed_right(a: Observable, mu: StochasticMatrix, b: Observable) -> Observable:
    """``A o (mu . B)`` by the direct sum ``sum_z mu[z, y] A_x^{1/2} B_z A_x^{1/2}``.

    Cross-checked against ``seq_product(a, post_process(mu, b))``.
    """
    _check_dims(a, b)
    if mu.source != b.space:
        raise SpaceMismatch(f"kernel source {mu.source.labels} != observable space {b.space.labels}")
    roots = _roots(a)
    inner = np.einsum("xij,zjk,xkl->xzil", roots, b.effects, roots)
    effects = np.einsum("zy,xzil->xyil", mu.entries, inner).reshape(-1, a.dim, a.dim)
    out = Observable(product_space(a.space, mu.target), effects, a.tol)
    ref = seq_product(a, post_process(mu, b))
    if not out.equals(ref):
        raise ConsistencyError(f"direct sum and generic route disagree by {out.max_deviation(ref):.3e}")
    return out


def seq_with_postprocessed_left(nu: StochasticMatrix, a: Observable, b: Observable) -> Observable:
    """``(nu . A) o B`` through the generic square root.

    When ``a`` and ``b`` are atomic the rank-one closed form is evaluated too
    and the two must agree.
    """
    _check_dims(a, b)
    if nu.source != a.space:
        raise SpaceMismatch(f"kernel source {nu.source.labels} != observable space {a.space.labels}")
    out = seq_product(post_process(nu, a), b)
    if is_atomic(a) and is_atomic(b):
        closed = atomic_left_form(nu, a, b)
        if not out.equals(closed):
            raise ConsistencyError(f"rank-one closed form disagrees by {out.max_deviation(closed):.3e}")
    return out


# Closed forms. Each builds effects without taking matrix square roots.


def sharp_right_form(a: Observable, mu: StochasticMatrix, b: Observable) -> Observable:
    """For sharp ``a``: ``sum_z mu[z, y] A_x B_z A_x``."""
    inner = np.einsum("xij,zjk,xkl->xzil", a.effects, b.effects, a.effects)
    effects = np.einsum("zy,xzil->xyil", mu.entries, inner).reshape(-1, a.dim, a.dim)
    return Observable(product_space(a.space, mu.target), effects, a.tol)


def sharp_left_form(nu: StochasticMatrix, a: Observable, b: Observable) -> Observable:
    """For sharp ``a``: ``sum_{r,s} sqrt(nu[r,x] nu[s,x]) A_r B_y A_s``."""
    s = np.einsum("rx,rij->xij", np.sqrt(nu.entries), a.effects)
    effects = np.einsum("xij,yjk,xkl->xyil", s, b.effects, s).reshape(-1, a.dim, a.dim)
    return Observable(product_space(nu.target, b.space), effects, a.tol)


def atomic_right_form(a: Observable, mu: StochasticMatrix, b: Observable) -> Observable:
    """For atomic ``a``, ``b``: ``[sum_z mu[z, y] |<phi_x, psi_z>|^2] |phi_x><phi_x|``."""
    phi, psi = atomic_vectors(a), atomic_vectors(b)
    overlaps = np.abs(phi.conj() @ psi.T) ** 2  # [x, z]
    weights = overlaps @ mu.entries  # [x, y]
    effects = np.einsum("xy,xij->xyij", weights, a.effects).reshape(-1, a.dim, a.dim)
    return Observable(product_space(a.space, mu.target), effects, a.tol)


def eta_vectors(nu: StochasticMatrix, phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """``eta[x, y] = sum_r sqrt(nu[r, x]) <phi_r, psi_y> phi_r``, shape ``(n, m, d)``.

    ``phi`` and ``psi`` hold one basis vector per row; the inner product is
    antilinear in its first slot.
    """
    overlaps = phi.conj() @ psi.T  # [r, y]
    return np.einsum("rx,ry,ri->xyi", np.sqrt(nu.entries), overlaps, phi)


def atomic_left_form(nu: StochasticMatrix, a: Observable, b: Observable) -> Observable:
    """For atomic ``a``, ``b``: ``|eta_xy><eta_xy|``."""
    eta = eta_vectors(nu, atomic_vectors(a), atomic_vectors(b))
    effects = np.einsum("xyi,xyj->xyij", eta, eta.conj()).reshape(-1, a.dim, a.dim)
    return Observable(product_space(nu.target, b.space), effects, a.tol)


def fourier_phase_form(mu: StochasticMatrix) -> Observable:
    """``(mu . Q) o P`` written out with explicit Fourier phases.

    Entry ``[r, s]`` of effect ``(j, k)`` is
    ``sqrt(mu[r, j] mu[s, j]) exp(2 pi i k (r - s) / d) / d``.
    """
    d = len(mu.source)
    r = np.arange(d)
    k = np.arange(d)
    phases = np.exp(2j * np.pi * k[:, None, None] * (r[:, None] - r[None, :])[None] / d) / d  # [k, r, s]
    amp = np.sqrt(mu.entries)  # [r, j]
    effects = np.einsum("rj,sj,krs->jkrs", amp, amp, phases).reshape(-1, d, d)
    return Observable(product_space(mu.target, OutcomeSpace.range(d)), effects)


def fourier(d: int) -> np.ndarray:
    """Unitary ``F[j, k] = exp(2 pi i j k / d) / sqrt(d)``; column ``k`` is ``F phi_k``."""
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def position_observable(d: int) -> Observable:
    return atomic_observable(np.eye(d))


def momentum_observable(d: int) -> Observable:
    return atomic_observable(fourier(d).T)


def fourier_basis(d: int) -> np.ndarray:
    """The vectors ``psi_k = F phi_k`` as rows."""
    return fourier(d).T.copy()

