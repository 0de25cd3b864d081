import numpy as np

from xyquench.correlators import CorrelatorSet
from xyquench.errors import NotPositive
from xyquench.qstate import TwoQubitState, build_state


def random_correlator_sets(n, seed=0):
    """Random sets obeying the T^zz composition rule that give a PSD state."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        mz, txx, tyy, txy = rng.uniform(-1, 1, 4)
        tzz = mz * mz - txx * tyy + txy * txy
        if abs(tzz) > 1:
            continue
        cs = CorrelatorSet(mz, txx, tyy, tzz, txy)
        try:
            build_state(cs)
        except NotPositive:
            continue
        out.append(cs)
    return out


def random_x_states(n, seed=0):
    return [build_state(cs) for cs in random_correlator_sets(n, seed)]


def random_density(rng, dim=4, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_product_state(rng):
    return TwoQubitState(np.kron(random_density(rng, 2), random_density(rng, 2)))


def brute_grid():
    """1 degree x 1 degree grid over theta in [0, 180], phi in [0, 360)."""
    th, ph = np.meshgrid(np.deg2rad(np.arange(181)), np.deg2rad(np.arange(360)), indexing="ij")
    return th.ravel(), ph.ravel()


def _brute_projectors(theta, phi):
    """(n, 2, 4, 4) operators I x |k><k| built from explicit kets."""
    c, sn, e = np.cos(theta / 2), np.sin(theta / 2), np.exp(1j * phi)
    k1 = np.stack([c, e * sn], axis=-1)
    k2 = np.stack([-np.conj(e) * sn, c], axis=-1)
    kets = np.stack([k1, k2], axis=1)  # (n, 2, 2)
    local = kets[..., :, None] * kets[..., None, :].conj()
    return np.einsum("ij,nkab->nkiajb", np.eye(2), local).reshape(len(theta), 2, 4, 4)


def _neg_xlogx(lam):
    lam = np.clip(lam, 0, None)
    return -np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1)), 0.0)


def brute_conditional_entropy(m, theta, phi, chunk=4096):
    """Independent route: explicit projectors, partial trace, eigvalsh.  Measures B."""
    out = []
    for i in range(0, len(theta), chunk):
        P = _brute_projectors(theta[i:i + chunk], phi[i:i + chunk])
        post = P @ m @ P
        rho_a = np.trace(post.reshape(post.shape[:2] + (2, 2, 2, 2)), axis1=3, axis2=5)
        pr = np.trace(rho_a, axis1=-2, axis2=-1).real
        safe = np.where(pr > 1e-12, pr, 1.0)
        lam = np.linalg.eigvalsh(rho_a / safe[..., None, None])
        h = _neg_xlogx(lam).sum(axis=-1)
        out.append(np.where(pr > 1e-12, pr * h, 0.0).sum(axis=-1))
    return np.concatenate(out)


def brute_dephased_entropy(m, theta, phi, chunk=4096):
    """Independent route: build the dephased 4x4 matrix and diagonalise it."""
    out = []
    for i in range(0, len(theta), chunk):
        P = _brute_projectors(theta[i:i + chunk], phi[i:i + chunk])
        deph = (P @ m @ P).sum(axis=1)
        out.append(_neg_xlogx(np.linalg.eigvalsh(deph)).sum(axis=-1))
    return np.concatenate(out)
