"""Dense LP cores.

Two solvers live here:

* :func:`solve_bounded` — a bounded-variable two-phase revised primal
  simplex over numpy arrays, with Dantzig pricing, a Bland fallback after
  a degeneracy streak, and a dual-simplex restart path for re-solving
  after bound changes (the branch-and-bound workhorse).
* :func:`solve_dense_exact` — a small two-phase tableau simplex with
  Bland's rule, run over ``fractions.Fraction`` (or floats on request),
  for places that need exact rational answers.

Statuses are results, not exceptions: infeasible and unbounded come back
in :class:`LpResult`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

_FEAS_TOL = 1e-9
_OPT_TOL = 1e-9
_PIVOT_TOL = 1e-7
_DEG_STREAK = 40
_REFACTOR_EVERY = 128
_REFACTOR_CAREFUL = 16
_PERTURB_MIN_COLS = 150
_PERTURB_SCALE = 1e-7

BASIC, AT_LO, AT_HI = 0, 1, 2


class _SingularBasis(Exception):
    """The current basis matrix is numerically singular."""


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float
    x: np.ndarray
    iterations: int
    basis: Optional[np.ndarray] = None  # row -> column index
    vstat: Optional[np.ndarray] = None  # column -> BASIC/AT_LO/AT_HI


class _Core:
    """Shared state for one (A, b) system with mutable bounds."""

    def __init__(self, c: np.ndarray, A: np.ndarray, b: np.ndarray,
                 lo: np.ndarray, hi: np.ndarray):
        self.m, n = A.shape
        # artificial columns live at n..n+m-1 permanently (bounds [0,0]
        # after phase 1) so bases referencing them stay valid
        self.n = n
        self.N = n + self.m
        self.A = np.hstack([A, np.eye(self.m)])
        self.b = b.astype(float)
        self.c = np.concatenate([c.astype(float), np.zeros(self.m)])
        self.lo = np.concatenate([lo.astype(float), np.zeros(self.m)])
        self.hi = np.concatenate([hi.astype(float), np.zeros(self.m)])
        self.basis = np.arange(n, n + self.m)
        self.vstat = np.full(self.N, AT_LO, dtype=np.int8)
        self.vstat[self.basis] = BASIC
        self.binv = np.eye(self.m)
        self.xb = np.zeros(self.m)
        self.iterations = 0
        self.careful = False

    # -- linear algebra helpers ------------------------------------------

    def nonbasic_value(self, j: int) -> float:
        return self.lo[j] if self.vstat[j] == AT_LO else self.hi[j]

    def refactor(self) -> None:
        B = self.A[:, self.basis]
        try:
            binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise _SingularBasis(str(exc)) from exc
        err = float(np.abs(binv @ B - np.eye(self.m)).max())
        if not np.isfinite(err) or err > 1e-6:
            raise _SingularBasis(f"inverse residual {err:.3g}")
        self.binv = binv
        self.recompute_xb()

    def recompute_xb(self) -> None:
        rhs = self.b.copy()
        for j in np.flatnonzero(self.vstat != BASIC):
            v = self.nonbasic_value(j)
            if v != 0.0:
                rhs -= self.A[:, j] * v
        self.xb = self.binv @ rhs

    def solution(self) -> np.ndarray:
        x = np.empty(self.N)
        for j in range(self.N):
            x[j] = self.nonbasic_value(j) if self.vstat[j] != BASIC else 0.0
        x[self.basis] = self.xb
        return x

    def reduced_costs(self, c: np.ndarray) -> np.ndarray:
        y = c[self.basis] @ self.binv
        return c - y @ self.A

    # -- primal simplex ---------------------------------------------------

    def primal(self, c: np.ndarray, max_iter: int) -> str:
        """Run primal iterations to optimality; assumes primal feasible."""
        streak = 0
        bland = self.careful
        refactor_every = _REFACTOR_CAREFUL if self.careful else _REFACTOR_EVERY
        since_refactor = 0
        weights = np.ones(self.N)  # devex reference weights
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError("simplex iteration limit hit")
            d = self.reduced_costs(c)
            down = (self.vstat == AT_LO) & (d < -_OPT_TOL)
            up = (self.vstat == AT_HI) & (d > _OPT_TOL)
            cand = np.flatnonzero(down | up)
            if cand.size == 0:
                return "optimal"
            if bland:
                j = cand[0]
            else:
                j = cand[int(np.argmax(d[cand] ** 2 / weights[cand]))]
            sigma = 1.0 if self.vstat[j] == AT_LO else -1.0
            col = self.binv @ self.A[:, j]
            step = self.hi[j] - self.lo[j]  # own bound flip: may be inf
            row = -1
            move = sigma * col
            for i in range(self.m):
                if move[i] > _PIVOT_TOL:
                    limit = (self.xb[i] - self.lo[self.basis[i]]) / move[i]
                elif move[i] < -_PIVOT_TOL:
                    if not np.isfinite(self.hi[self.basis[i]]):
                        continue
                    limit = (self.xb[i] - self.hi[self.basis[i]]) / move[i]
                else:
                    continue
                if limit < step - 1e-12 or (
                    row >= 0
                    and limit < step + 1e-12
                    and (
                        (bland and self.basis[i] < self.basis[row])
                        or (not bland and abs(move[i]) > abs(move[row]))
                    )
                ):
                    step = limit
                    row = i
            if not np.isfinite(step):
                return "unbounded"
            step = max(step, 0.0)
            self.iterations += 1
            since_refactor += 1
            streak = streak + 1 if step <= 1e-11 else 0
            bland = self.careful or streak > _DEG_STREAK
            if row < 0:  # bound flip, basis unchanged
                self.vstat[j] = AT_HI if sigma > 0 else AT_LO
                self.xb -= move * step
                continue
            leave = self.basis[row]
            piv = col[row]
            # devex update from the pivot row of the outgoing tableau
            pivot_row = self.binv[row, :] @ self.A
            grow = (pivot_row / piv) ** 2 * weights[j]
            weights = np.maximum(weights, grow)
            weights[leave] = max(weights[j] / piv**2, 1.0)
            wmax = weights.max()
            if not np.isfinite(wmax) or wmax > 1e7:
                weights = np.ones(self.N)
            self.vstat[leave] = AT_LO if move[row] > 0 else AT_HI
            enter_value = self.nonbasic_value(j) + sigma * step
            self.xb -= move * step
            self.xb[row] = enter_value
            self.basis[row] = j
            self.vstat[j] = BASIC
            if abs(piv) < _PIVOT_TOL:
                self.refactor()
            else:
                self.binv[row, :] /= piv
                for i in range(self.m):
                    if i != row and col[i] != 0.0:
                        self.binv[i, :] -= col[i] * self.binv[row, :]
            if since_refactor >= refactor_every:
                since_refactor = 0
                self.refactor()

    # -- dual simplex ------------------------------------------------------

    def dual(self, c: np.ndarray, max_iter: int) -> str:
        """Restore primal feasibility from a dual-feasible basis.

        Returns "stalled" after a long degenerate streak; the caller is
        expected to fall back to a cold solve (this path only serves
        re-optimization, so abandoning it never loses an answer).
        """
        refactor_every = _REFACTOR_CAREFUL if self.careful else _REFACTOR_EVERY
        since_refactor = 1  # force one refactor before any certificate
        streak = 0
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError("simplex iteration limit hit")
            if streak > 5 * _DEG_STREAK:
                return "stalled"
            lo_b = self.lo[self.basis]
            hi_b = self.hi[self.basis]
            below = lo_b - self.xb
            above = self.xb - hi_b
            above[~np.isfinite(hi_b)] = -np.inf
            worst = np.maximum(below, above)
            r = int(np.argmax(worst))
            if worst[r] <= _FEAS_TOL:
                return "optimal"
            need_up = below[r] >= above[r]
            alpha = self.binv[r, :] @ self.A
            d = self.reduced_costs(c)
            best_j = -1
            best_ratio = np.inf
            for j in range(self.N):
                if self.vstat[j] == BASIC or self.lo[j] == self.hi[j]:
                    continue
                a = alpha[j]
                if need_up:
                    ok = (self.vstat[j] == AT_LO and a < -_PIVOT_TOL) or (
                        self.vstat[j] == AT_HI and a > _PIVOT_TOL
                    )
                else:
                    ok = (self.vstat[j] == AT_LO and a > _PIVOT_TOL) or (
                        self.vstat[j] == AT_HI and a < -_PIVOT_TOL
                    )
                if not ok:
                    continue
                ratio = abs(d[j]) / abs(a)
                if ratio < best_ratio - 1e-12 or (
                    ratio < best_ratio + 1e-12 and (best_j < 0 or j < best_j)
                ):
                    best_ratio = ratio
                    best_j = j
            if best_j < 0:
                # before certifying, rule out eta drift: recompute the
                # inverse once, and accept noise-level violations
                if since_refactor > 0:
                    since_refactor = 0
                    self.refactor()
                    continue
                if worst[r] <= 1e-6:
                    return "optimal"
                return "infeasible"
            streak = streak + 1 if best_ratio < 1e-11 else 0
            self.iterations += 1
            since_refactor += 1
            leave = self.basis[r]
            self.vstat[leave] = AT_LO if need_up else AT_HI
            self.basis[r] = best_j
            self.vstat[best_j] = BASIC
            col = self.binv @ self.A[:, best_j]
            piv = col[r]
            if abs(piv) < _PIVOT_TOL or since_refactor >= refactor_every:
                since_refactor = 0
                self.refactor()
            else:
                self.binv[r, :] /= piv
                for i in range(self.m):
                    if i != r and col[i] != 0.0:
                        self.binv[i, :] -= col[i] * self.binv[r, :]
                self.recompute_xb()


def _phase1(core: _Core, max_iter: int) -> str:
    """Start from the all-artificial basis and drive infeasibility to 0."""
    resid = core.b.copy()
    for j in range(core.n):
        if not np.isfinite(core.lo[j]):
            raise ValueError("columns must have finite lower bounds")
        core.vstat[j] = AT_LO
        if core.lo[j] != 0.0:
            resid -= core.A[:, j] * core.lo[j]
    c1 = np.zeros(core.N)
    for i in range(core.m):
        j = core.n + i
        core.basis[i] = j
        core.vstat[j] = BASIC
        if resid[i] >= 0.0:
            core.lo[j], core.hi[j] = 0.0, np.inf
            c1[j] = 1.0
        else:
            core.lo[j], core.hi[j] = -np.inf, 0.0
            c1[j] = -1.0
    core.binv = np.eye(core.m)
    core.xb = resid.copy()
    status = core.primal(c1, max_iter)
    if status != "optimal":
        return "infeasible"  # phase 1 is bounded below by 0
    if float(c1 @ core.solution()) > 1e-7:
        return "infeasible"
    # pin artificials to zero; pivot basic ones out where possible
    for i in range(core.m):
        j = core.basis[i]
        if j < core.n:
            continue
        alpha = core.binv[i, :] @ core.A[:, : core.n]
        pick = -1
        for k in range(core.n):
            if core.vstat[k] != BASIC and abs(alpha[k]) > 1e-8:
                pick = k
                break
        if pick >= 0:
            col = core.binv @ core.A[:, pick]
            core.vstat[j] = AT_LO
            core.basis[i] = pick
            core.vstat[pick] = BASIC
            piv = col[i]
            core.binv[i, :] /= piv
            for r in range(core.m):
                if r != i and col[r] != 0.0:
                    core.binv[r, :] -= col[r] * core.binv[i, :]
    for i in range(core.m):
        j = core.n + i
        core.lo[j] = core.hi[j] = 0.0
        if core.vstat[j] != BASIC:
            core.vstat[j] = AT_LO
    core.recompute_xb()
    return "optimal"


def _finish(core: _Core, c: np.ndarray, status: str) -> LpResult:
    x = core.solution()[: core.n]
    if status != "optimal":
        return LpResult(status, float("nan"), x, core.iterations)
    obj = float(c @ x)
    return LpResult("optimal", obj, x, core.iterations,
                    basis=core.basis.copy(), vstat=core.vstat.copy())


def _cold_solve(c: np.ndarray, A: np.ndarray, b: np.ndarray,
                lo: np.ndarray, hi: np.ndarray, limit: int,
                careful: bool, allow_perturb: bool = True) -> LpResult:
    core = _Core(c, A, b, lo, hi)
    core.careful = careful
    # anti-degeneracy: on large models, widen every finite bound by a tiny
    # deterministic amount so ratio-test steps stay positive, then restore
    # the true bounds and repair with dual + primal passes (which end at
    # the exact optimum of the unperturbed program)
    perturb = allow_perturb and not careful and core.n >= _PERTURB_MIN_COLS
    if perturb:
        rng = np.random.default_rng(0x5EED)
        true_lo = core.lo[: core.n].copy()
        true_hi = core.hi[: core.n].copy()
        eta_lo = _PERTURB_SCALE * (1 + np.abs(true_lo)) * (1 + rng.random(core.n))
        eta_hi = _PERTURB_SCALE * (1 + np.abs(true_hi)) * (1 + rng.random(core.n))
        fin = np.isfinite(true_lo)
        core.lo[: core.n][fin] = true_lo[fin] - eta_lo[fin]
        fin = np.isfinite(true_hi)
        core.hi[: core.n][fin] = true_hi[fin] + eta_hi[fin]
    status = _phase1(core, limit)
    if status != "optimal":
        return LpResult("infeasible", float("nan"), np.zeros(core.n),
                        core.iterations)
    status = core.primal(core.c, limit)
    if perturb and status == "optimal":
        core.lo[: core.n] = true_lo
        core.hi[: core.n] = true_hi
        core.recompute_xb()
        status = core.dual(core.c, limit)
        if status != "optimal":
            # the perturbed basis could not be repaired cleanly (stall or
            # a certificate on shrunk bounds): solve the true bounds
            # from scratch, where phase 1 settles feasibility itself
            return _cold_solve(c, A, b, lo, hi, limit, careful=False,
                               allow_perturb=False)
        status = core.primal(core.c, limit)
    return _finish(core, c, status)


def solve_bounded(
    c: Sequence[float],
    A: np.ndarray,
    b: Sequence[float],
    lo: Sequence[float],
    hi: Sequence[float],
    start: Optional[tuple[np.ndarray, np.ndarray]] = None,
    max_iter: Optional[int] = None,
) -> LpResult:
    """Minimize c'x subject to Ax = b, lo <= x <= hi.

    ``start`` re-optimizes from a (basis, vstat) pair produced by an
    earlier solve of the same system under different bounds: the basis is
    refactored, nonbasic variables snap to their bounds, and a dual
    simplex repairs primal feasibility (the reduced costs still price out
    because neither A nor c changed).
    """
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    lo_arr = np.asarray(lo, dtype=float)
    hi_arr = np.asarray(hi, dtype=float)
    if np.any(lo_arr > hi_arr + 1e-12):
        return LpResult("infeasible", float("nan"), np.zeros(A.shape[1]), 0)
    n_rows, n_cols = A.shape
    limit = max_iter if max_iter is not None else 2000 + 200 * (n_rows + n_cols)

    if start is not None:
        core = _Core(c, A, b, lo_arr, hi_arr)
        basis, vstat = start
        core.basis = np.array(basis, dtype=int).copy()
        core.vstat = np.array(vstat, dtype=np.int8).copy()
        for j in range(core.n, core.N):  # artificials stay pinned
            core.lo[j] = core.hi[j] = 0.0
        try:
            core.refactor()
            # bounds moved: snap nonbasic values back inside them
            for j in range(core.N):
                if core.vstat[j] == AT_HI and not np.isfinite(core.hi[j]):
                    core.vstat[j] = AT_LO
            core.recompute_xb()
            status = core.dual(core.c, limit)
            if status == "optimal":
                status = core.primal(core.c, limit)
                return _finish(core, c, status)
            # "infeasible" here is a certificate on a drifted basis and
            # "stalled" a degeneracy bailout; both restart from scratch
            # so no caller ever prunes on a warm-start artifact
        except _SingularBasis:
            pass  # stale basis: fall through to a cold solve

    try:
        return _cold_solve(c, A, b, lo_arr, hi_arr, limit, careful=False)
    except _SingularBasis:
        # numerical trouble: retry with Bland pricing and tight refactoring
        try:
            return _cold_solve(c, A, b, lo_arr, hi_arr, limit, careful=True)
        except _SingularBasis as exc:
            raise RuntimeError(f"singular basis persisted: {exc}") from exc


# ---------------------------------------------------------------------------
# exact tableau simplex (small problems, Fractions)
# ---------------------------------------------------------------------------

def solve_dense_exact(
    objective: Sequence,
    rows: Sequence[Sequence],
    rhs: Sequence,
    exact: bool = True,
):
    """Minimize c'x subject to rows·x >= rhs, x >= 0.

    Two-phase tableau with Bland's rule; ``exact=True`` pivots over
    Fractions (termination and exactness guaranteed), otherwise floats.
    Returns (objective value, x values).  Raises on infeasible/unbounded
    input — callers here only pose feasible bounded programs.
    """
    if exact:
        conv = Fraction
        is_neg = lambda v: v < 0  # noqa: E731
        is_pos = lambda v: v > 0  # noqa: E731
    else:
        conv = float
        is_neg = lambda v: v < -1e-11  # noqa: E731
        is_pos = lambda v: v > 1e-11  # noqa: E731

    n = len(objective)
    m = len(rows)
    c = [conv(v) for v in objective]
    # >= rows become equalities with a surplus; rows with negative rhs are
    # flipped so the (then positive) slack can start basic
    tab: list[list] = []
    basis: list[int] = []
    art_cols: list[int] = []
    ncols = n + m  # x columns then one surplus/slack per row
    for i in range(m):
        row = [conv(v) for v in rows[i]] + [conv(0)] * m + [conv(rhs[i])]
        row[n + i] = conv(-1)
        if is_neg(row[-1]):
            row = [-v for v in row]
        tab.append(row)
    for i in range(m):
        if tab[i][n + i] == 1:
            basis.append(n + i)
        else:
            for r in tab:
                r.insert(-1, conv(0))
            tab[i][ncols] = conv(1)
            basis.append(ncols)
            art_cols.append(ncols)
            ncols += 1

    def pivot(r: int, col: int) -> None:
        piv = tab[r][col]
        tab[r] = [v / piv for v in tab[r]]
        for i in range(m):
            if i != r and tab[i][col] != 0:
                f = tab[i][col]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[r])]
        basis[r] = col

    def run(cost: list, banned: frozenset = frozenset()) -> None:
        # reduced costs priced off the current tableau each round: the
        # models sent here are small, so clarity beats a maintained z-row
        while True:
            in_basis = set(basis)
            y = [cost[basis[i]] for i in range(m)]
            enter = -1
            for j in range(ncols):
                if j in in_basis or j in banned:
                    continue
                red = cost[j] - sum(y[i] * tab[i][j] for i in range(m))
                if is_neg(red):
                    enter = j
                    break  # Bland: first improving column
            if enter < 0:
                return
            leave = -1
            best = None
            for i in range(m):
                a = tab[i][enter]
                if is_pos(a):
                    ratio = tab[i][-1] / a
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                raise RuntimeError("LP unbounded")
            pivot(leave, enter)

    if art_cols:
        cost1 = [conv(0)] * ncols
        for j in art_cols:
            cost1[j] = conv(1)
        run(cost1)
        infeas = sum(tab[i][-1] for i in range(m) if basis[i] in art_cols)
        bad = (infeas > 0) if exact else (infeas > 1e-7)
        if bad:
            raise RuntimeError("LP infeasible")
        for i in range(m):  # pivot out any basic artificial sitting at 0
            if basis[i] in art_cols:
                for j in range(ncols):
                    if j not in art_cols and j not in basis and tab[i][j] != 0:
                        pivot(i, j)
                        break

    cost2 = [conv(0)] * ncols
    for j in range(n):
        cost2[j] = c[j]
    run(cost2, banned=frozenset(art_cols))
    x = [conv(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    value = sum(c[j] * x[j] for j in range(n))
    return value, x
