"""Root functions: eigenfunctions, associated chains, biorthogonal duals.

An eigenfunction at lambda is u = alpha c + beta s with (alpha, beta) in the
null space of the 2x2 boundary-form matrix M(lambda) = [B_i(c), B_i(s)],
whose determinant is the characteristic determinant.  Associated functions
of order p solve L u + lambda u = u^(p-1) subject to the same boundary
forms; they are built from a particular solution plus a homogeneous
correction fitted by least squares, and cross-checked against the
lambda-derivative (jet) construction.

The dual system comes from the adjoint problem: coefficient conj(q),
boundary matrix derived from the Lagrange bilinear form, eigenvalue
conj(lambda).  Duals are paired per root subspace by inverting the local
Gram matrix, which reproduces the chain-reversal pairing inside Jordan
blocks automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bc import BcMatrix
from .errors import InvalidInputError, NotAnEigenvalueError, NumericalFailureError
from .ode import (DEFAULT_TOL, SolutionTrace, fundamental_traces,
                  fundamental_traces_many, solve_inhomogeneous)
from .potential import Potential
from .quadrature import inner, norm

TRACE_POINTS = 1201


def boundary_forms(A: BcMatrix, trace: SolutionTrace) -> np.ndarray:
    """(B_1(u), B_2(u)) for a sampled solution."""
    u0, up0, upi_, uppi = trace.endpoint_data()
    return A.boundary_form(u0, up0, upi_, uppi)


def _form_matrix(A: BcMatrix, C, Cp, S, Sp, j: int = 0) -> np.ndarray:
    """Boundary-form matrix [B_i(c_j), B_i(s_j)] from order-j derivative traces."""
    a = A.rows
    bc_ = a[:, 0] * Cp[j, 0] + a[:, 1] * Cp[j, -1] + a[:, 2] * C[j, 0] + a[:, 3] * C[j, -1]
    bs_ = a[:, 0] * Sp[j, 0] + a[:, 1] * Sp[j, -1] + a[:, 2] * S[j, 0] + a[:, 3] * S[j, -1]
    return np.stack((bc_, bs_), axis=1)


def _mu_of(rec) -> complex:
    return complex(getattr(rec, "mu", rec))


def _singular_lstsq(M, b, cutoff_rel: float = 1e-8):
    """Min-norm least squares that treats near-null directions as exact zeros.

    At an eigenvalue the boundary-form matrix is singular up to integration
    residue; a plain solve would blast a huge near-eigenfunction component
    into the correction and fake solvability.
    """
    U, s, Vh = np.linalg.svd(M)
    cut = cutoff_rel * max(float(s[0]), 1.0)
    inv = np.array([1.0 / sv if sv > cut else 0.0 for sv in s])
    gamma = np.conj(Vh).T @ (inv * (np.conj(U).T @ b))
    resid = float(np.max(np.abs(M @ gamma - b)))
    return gamma, resid


def _fix_phase(u, up, mu):
    w = max(1.0, abs(mu))
    z = u[0] if abs(u[0]) >= abs(up[0]) / w else up[0] / w
    if abs(z) < 1e-12:
        z = u[int(np.argmax(np.abs(u)))]
    ph = np.conj(z) / abs(z)
    return u * ph, up * ph


def eigenfunction(q: Potential, A: BcMatrix, rec, *, grid=None,
                  tol: float = DEFAULT_TOL, rank_tol: float = 1e-6):
    """Eigenfunction trace(s) at a located eigenvalue.

    Returns a list of SolutionTrace: one entry normally, two independent
    traces flagged "geometric-pair" when the boundary-form matrix is
    numerically rank 0 (geometric multiplicity 2).  Raises
    NotAnEigenvalueError when the matrix is far from singular.  Traces are
    normalized to unit quadratic mean with a deterministic phase.
    """
    mu = _mu_of(rec)
    if grid is None:
        grid = q.trace_grid(TRACE_POINTS)
    C, Cp, S, Sp = fundamental_traces(q, mu, grid, m=0, tol=tol)
    M = _form_matrix(A, C, Cp, S, Sp)
    scale = float(np.max(np.abs(M))) or 1.0
    _, sv, Vh = np.linalg.svd(M)
    lam = mu * mu
    if sv[1] > rank_tol * max(1.0, scale):
        raise NotAnEigenvalueError(
            f"boundary matrix nonsingular at mu = {mu:.6g} (s_min = {sv[1]:.3g})")
    rank0 = sv[0] <= rank_tol * max(1.0, scale)
    vecs = [np.conj(Vh[1])] if not rank0 else [np.conj(Vh[0]), np.conj(Vh[1])]
    out = []
    for k, (al, be) in enumerate(vecs):
        u = al * C[0] + be * S[0]
        up = al * Cp[0] + be * Sp[0]
        if rank0 and k == 1:
            # orthogonalize the second branch against the first in L2
            u_prev, up_prev = out[0].u, out[0].up
            proj = inner(u, u_prev, grid)
            u = u - proj * u_prev
            up = up - proj * up_prev
        nrm = norm(u, grid)
        if nrm < 1e-12:
            raise NumericalFailureError("eigenfunction collapsed to zero")
        u, up = u / nrm, up / nrm
        u, up = _fix_phase(u, up, mu)
        out.append(SolutionTrace(lam=lam, grid=grid, u=u, up=up,
                                 flag="geometric-pair" if rank0 else None))
    return out


@dataclass
class RootChain:
    """u^0 (eigenfunction) followed by associated functions u^1 .. u^p."""

    eigen: object                     # EigenvalueRecord or bare mu
    chain: list                       # SolutionTrace, length p + 1
    boundary_residuals: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.chain) - 1


def root_subspace(q: Potential, A: BcMatrix, rec, *, p_max=None,
                  grid=None, tol: float = DEFAULT_TOL,
                  bc_tol: float = 1e-7) -> list:
    """All Jordan chains at one eigenvalue, total length <= its multiplicity.

    Each chain starts from one eigenfunction branch; u^p is a particular
    solution of L u + lambda u = u^(p-1) plus the least-squares homogeneous
    correction.  A chain stops at the first order whose correction cannot
    meet the boundary residual tolerance.
    """
    mu = _mu_of(rec)
    lam = mu * mu
    mult = getattr(rec, "multiplicity", None)
    if p_max is None:
        p_max = (mult - 1) if mult else 0
    if grid is None:
        grid = q.trace_grid(TRACE_POINTS)
    branches = eigenfunction(q, A, rec, grid=grid, tol=tol)
    C, Cp, S, Sp = fundamental_traces(q, mu, grid, m=0, tol=tol)
    M = _form_matrix(A, C, Cp, S, Sp)
    budget = mult if mult else (p_max + 1)
    chains = []
    used = 0
    for branch in branches:
        chain = [branch]
        residuals = [float(np.max(np.abs(boundary_forms(A, branch))))]
        used += 1
        while len(chain) <= p_max and used < budget:
            part = solve_inhomogeneous(q, lam, chain[-1], 0.0, 0.0, grid=grid, tol=tol)
            bpart = A.boundary_form(part.u[0], part.up[0], part.u[-1], part.up[-1])
            gamma, resid = _singular_lstsq(M, -bpart)
            if resid > bc_tol * (1.0 + float(np.max(np.abs(bpart)))):
                break
            u = part.u + gamma[0] * C[0] + gamma[1] * S[0]
            up = part.up + gamma[0] * Cp[0] + gamma[1] * Sp[0]
            chain.append(SolutionTrace(lam=lam, grid=grid, u=u, up=up))
            residuals.append(resid)
            used += 1
        chains.append(RootChain(eigen=rec, chain=chain, boundary_residuals=residuals))
    return chains


def associated_chain(q: Potential, A: BcMatrix, rec, p_max=None, **kw) -> RootChain:
    """Primary Jordan chain at an eigenvalue (first eigenfunction branch)."""
    return root_subspace(q, A, rec, p_max=p_max, **kw)[0]


def build_chains(q: Potential, A: BcMatrix, records, *, grid=None,
                 tol: float = DEFAULT_TOL) -> list:
    """Root chains for many records; integrates all traces as one batch."""
    if grid is None:
        grid = q.trace_grid(TRACE_POINTS)
    fundamental_traces_many(q, [_mu_of(r) for r in records], grid, m=0, tol=tol)
    out = []
    for rec in records:
        out.extend(root_subspace(q, A, rec, grid=grid, tol=tol))
    return out


def chain_via_jets(q: Potential, A: BcMatrix, rec, p_max: int, *,
                   grid=None, tol: float = DEFAULT_TOL,
                   consistency_tol: float = 1e-6) -> list:
    """Jordan chain from lambda-derivative jets; independent of the
    inhomogeneous-solve route.

    Builds a vector jet v(lambda) with M(lambda) v(lambda) = O((lambda -
    lambda_0)^(p+1)) order by order, then u^p = (-1)^p * [coefficient of
    (lambda - lambda_0)^p in v(lambda)^T (c, s)(lambda)].  Returns the list
    of traces (length <= p_max + 1); stops early when the order-p linear
    system loses consistency.
    """
    mu = _mu_of(rec)
    lam = mu * mu
    if grid is None:
        grid = q.trace_grid(TRACE_POINTS)
    m = p_max
    C, Cp, S, Sp = fundamental_traces(q, mu, grid, m=m, tol=tol)
    fact = [math.factorial(j) for j in range(m + 1)]
    Ms = [_form_matrix(A, C, Cp, S, Sp, j) / fact[j] for j in range(m + 1)]
    _, sv, Vh = np.linalg.svd(Ms[0])
    scale = max(1.0, float(np.max(np.abs(Ms[0]))))
    vjets = [np.conj(Vh[1])]
    traces = []
    for p in range(m + 1):
        if p > 0:
            rhs = -sum(Ms[j] @ vjets[p - j] for j in range(1, p + 1))
            vp, resid = _singular_lstsq(Ms[0], rhs)
            if resid > consistency_tol * scale:
                break
            vjets.append(vp)
        u = np.zeros_like(C[0])
        up = np.zeros_like(C[0])
        for k in range(p + 1):
            j = p - k
            al, be = vjets[k]
            u = u + (al * C[j] + be * S[j]) / fact[j]
            up = up + (al * Cp[j] + be * Sp[j]) / fact[j]
        sgn = (-1) ** p
        traces.append(SolutionTrace(lam=lam, grid=grid, u=sgn * u, up=sgn * up))
    return traces


def adjoint_matrix(A: BcMatrix) -> BcMatrix:
    """Boundary matrix of the Lagrange-adjoint problem.

    Built from a basis (n_1, n_2) of the null space of A: the adjoint forms
    express that the bilinear boundary term u'(x) conj(v)(x) - u(x)
    conj(v)'(x) vanishes at 0 and pi against every admissible u.
    """
    _, sv, Vh = np.linalg.svd(A.rows)
    if sv[1] <= 1e-12 * max(1.0, sv[0]):
        raise InvalidInputError("boundary matrix rows are dependent")
    rows = []
    for k in (2, 3):
        n = np.conj(Vh[k])
        rows.append([np.conj(n[2]), -np.conj(n[3]), -np.conj(n[0]), np.conj(n[1])])
    return BcMatrix(np.asarray(rows))


def adjoint_problem(q: Potential, A: BcMatrix):
    return q.conjugate(), adjoint_matrix(A)


@dataclass
class BiorthogonalPair:
    """Flattened root system {u_n} with its dual {v_n} on a shared grid."""

    us: list
    vs: list
    gram_residual: float
    labels: list = field(default_factory=list)

    def __len__(self):
        return len(self.us)


class _AdjointRecord:
    def __init__(self, mu, multiplicity):
        self.mu = mu
        self.multiplicity = multiplicity


def dual_system(q: Potential, A: BcMatrix, chains: list, *,
                tol: float = DEFAULT_TOL, pairing_tol: float = 1e-8) -> BiorthogonalPair:
    """Biorthogonal dual system for a list of RootChain.

    Solves the adjoint problem at conj(lambda) for each eigenvalue, then
    pairs duals inside every root subspace by inverting the local Gram
    matrix (the chain-reversal rule falls out of this inversion).  The
    returned gram_residual is the largest deviation of <u_n, v_m> from
    delta_nm across the whole window.
    """
    if len(chains) < 2:
        raise InvalidInputError("need at least two chains for a dual system")
    qs, As = adjoint_problem(q, A)
    grid = chains[0].chain[0].grid

    def star(mu):
        ms = complex(np.sqrt(np.conj(mu * mu)))
        return ms if ms.real >= 0 else -ms

    fundamental_traces_many(qs, [star(_mu_of(ch.eigen)) for ch in chains],
                            grid, m=0, tol=tol)
    # chains sharing one eigenvalue (several geometric branches) form a
    # single root subspace and must be paired jointly
    groups = []
    for ci, ch in enumerate(chains):
        lam = _mu_of(ch.eigen) ** 2
        for g in groups:
            if abs(g["lam"] - lam) <= 1e-8 * (1.0 + abs(lam)):
                g["members"].append((ci, ch))
                break
        else:
            groups.append({"lam": lam, "members": [(ci, ch)]})
    us, vs, labels = [], [], []
    for g in groups:
        mu = _mu_of(g["members"][0][1].eigen)
        mu_star = star(mu)
        uu = []
        tags = []
        for ci, ch in g["members"]:
            for j, tr in enumerate(ch.chain):
                uu.append(tr)
                tags.append((ci, j))
        dim = len(uu)
        arec = _AdjointRecord(mu_star, dim)
        adj_chains = root_subspace(qs, As, arec, p_max=dim - 1, grid=grid, tol=tol)
        ws = [t for ach in adj_chains for t in ach.chain][:dim]
        if len(ws) < dim:
            raise NumericalFailureError(
                f"adjoint subspace at mu = {mu:.6g} is smaller than the primal one")
        G = np.array([[inner(ui.u, wj.u, grid) for wj in ws] for ui in uu])
        sv = np.linalg.svd(G, compute_uv=False)
        if sv[-1] <= pairing_tol * max(1.0, sv[0]):
            raise NumericalFailureError(
                f"degenerate primal/dual pairing at mu = {mu:.6g}")
        Cmat = np.conj(np.linalg.inv(G)).T
        for j in range(dim):
            vu = sum(Cmat[j, k] * ws[k].u for k in range(dim))
            vup = sum(Cmat[j, k] * ws[k].up for k in range(dim))
            vs.append(SolutionTrace(lam=np.conj(uu[j].lam), grid=grid, u=vu, up=vup))
            us.append(uu[j])
            labels.append(tags[j])
    N = len(us)
    G = np.array([[inner(us[i].u, vs[j].u, grid) for j in range(N)] for i in range(N)])
    gram_residual = float(np.max(np.abs(G - np.eye(N))))
    return BiorthogonalPair(us=us, vs=vs, gram_residual=gram_residual, labels=labels)


@dataclass
class BasisDiagnostics:
    gram_cond: float
    norm_products: list
    kernel_sup: list


def basis_diagnostics(pair: BiorthogonalPair, N: int) -> BasisDiagnostics:
    """Finite-section basis indicators.

    gram_cond: condition number of the N x N Gram matrix of the normalized
    u_n (Riesz-basis finite-section indicator); norm_products: the products
    ||u_n|| ||v_n|| whose divergence marks non-basisness; kernel_sup: sup of
    |u_n(x) conj(v_n)(xi)| over the trace grid.
    """
    if N > len(pair):
        raise InvalidInputError(f"only {len(pair)} pairs computed, asked for {N}")
    grid = pair.us[0].grid
    un = []
    for t in pair.us[:N]:
        nn = norm(t.u, grid)
        un.append(t.u / nn)
    G = np.array([[inner(un[i], un[j], grid) for j in range(N)] for i in range(N)])
    gram_cond = float(np.linalg.cond(G))
    norm_products = []
    kernel_sup = []
    for t_u, t_v in zip(pair.us[:N], pair.vs[:N]):
        nu, nv = norm(t_u.u, grid), norm(t_v.u, grid)
        norm_products.append(nu * nv)
        kernel_sup.append(float(np.max(np.abs(t_u.u)) * np.max(np.abs(t_v.u))))
    return BasisDiagnostics(gram_cond=gram_cond, norm_products=norm_products,
                            kernel_sup=kernel_sup)
