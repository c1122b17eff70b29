"""Joint MAP inference over tracker lattices and predicate HMMs.

For one conjunctive branch with variables v and atoms p, the objective
over per-frame detection choices j and HMM states k is

    sum_v [ sum_t f(j_v,t) + sum_{t>=2} g(j_v,t-1, j_v,t) ]
  + sum_p [ sum_t h_p(k_p,t, j_{theta(p)},t) + sum_{t>=2} a_p(k_p,t-1, k_p,t) ]

with f the detection confidence, g the motion-coherence score, h the
HMM observation score and a the log transition probability.  The joint
state space factorizes, so the Viterbi recursion relaxes one axis at a
time; ties are broken toward the lexicographically smallest composite
state sequence (variables-major, then predicate axes), which is also
what exhaustive enumeration in order produces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hmms import FeaturePack, PredicateLibrary, build_library, pack_features
from .logic import ConjunctiveBranch, Formula, name_to_person, normalize
from .perception import VideoTrace

__all__ = ["InferenceError", "MapResult", "FormulaResult", "score_branch",
           "brute_force_score", "brute_force_cost", "beam_score",
           "score_formula", "score_common",
           "DEFAULT_BANDWIDTH", "STATE_CAP", "BRUTE_FORCE_CAP"]

NEG_INF = float("-inf")
DEFAULT_BANDWIDTH = 40.0     # px, motion-coherence scale
STATE_CAP = 2_000_000        # composite states per frame, exact DP
BRUTE_FORCE_CAP = 10_000_000 # composite state sequences, oracle


class InferenceError(ValueError):
    pass


@dataclass
class MapResult:
    """MAP value and argmax for one conjunctive branch."""
    total: float
    detections: list[list[int]]      # [variable][frame] -> detection index
    states: list[list[int]]          # [atom][frame] -> HMM state index
    breakdown: dict[str, float]      # detection / motion / observation / transition
    variables: list[str]
    atoms: list[str]

    @property
    def feasible(self) -> bool:
        return self.total > NEG_INF


@dataclass
class FormulaResult:
    """Best branch of a formula's DNF."""
    total: float
    branch_index: int
    branch: ConjunctiveBranch
    result: MapResult
    branch_totals: list[float] = field(default_factory=list)


# ---------------------------------------------------------------------------
# problem assembly


class _Problem:
    """Tensorized tables for one (branch, trace) pair.

    Composite axes, in order: one per variable (size D), then one per
    multi-state atom (size S_p).  Single-state atoms contribute their
    observation directly to the emission tensor.
    """

    def __init__(self, branch: ConjunctiveBranch, pack: FeaturePack,
                 library: PredicateLibrary, bandwidth: float):
        self.branch = branch
        self.pack = pack
        self.T = pack.num_frames
        self.D = pack.max_detections
        self.V = len(branch.variables)
        if self.V == 0:
            raise InferenceError("branch has no variables")

        self.models = [library.get(a.predicate) for a in branch.atoms]
        self.dynamic = [i for i, m in enumerate(self.models) if m.num_states > 1]
        self.S = tuple(self.models[i].num_states for i in self.dynamic)
        self.shape = (self.D,) * self.V + self.S
        cells = int(np.prod(self.shape))
        if cells > STATE_CAP:
            raise InferenceError(
                f"{cells} composite states per frame exceeds the cap of "
                f"{STATE_CAP}; use beam_score")
        self.num_axes = self.V + len(self.dynamic)

        # motion coherence g[t-1]: prev detection i -> current detection j
        c, v = pack.center, pack.velocity
        gap = c[1:, None, :, :] - (c[:-1, :, None, :] + v[:-1, :, None, :])
        self.G = -(gap ** 2).sum(axis=-1) / (bandwidth * bandwidth)

        self.trans = [self.models[i].log_transition for i in self.dynamic]
        self.emit = self._emissions(library)
        self.init_mask, self.accept_mask = self._masks()

    def _place(self, table: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
        """Broadcast [T, ...] over the composite axes listed in ``axes``."""
        if len(axes) == 2 and axes[0] == axes[1]:
            table = np.einsum("tii->ti", table)
            axes = axes[:1]
        if len(axes) == 2 and axes[0] > axes[1]:
            table = np.swapaxes(table, 1, 2)
            axes = (axes[1], axes[0])
        shape = [self.T] + [1] * self.num_axes
        for ax, size in zip(axes, table.shape[1:]):
            shape[1 + ax] = size
        return table.reshape(shape)

    def _emissions(self, library: PredicateLibrary) -> np.ndarray:
        E = np.zeros((self.T,) + self.shape)
        for v in range(self.V):
            E = E + self._place(self.pack.conf, (v,))
        dyn_axis = {atom_i: self.V + n for n, atom_i in enumerate(self.dynamic)}
        for i, (atom, model) in enumerate(zip(self.branch.atoms, self.models)):
            table = model.observation_tables(library.config, self.pack)
            var_axes = self.branch.theta[i]
            if model.num_states == 1:
                E = E + self._place(table[:, 0], var_axes)
            else:
                if len(var_axes) == 2 and var_axes[0] == var_axes[1]:
                    table = np.einsum("tsii->tsi", table)
                    var_axes = var_axes[:1]
                elif len(var_axes) == 2 and var_axes[0] > var_axes[1]:
                    table = np.swapaxes(table, 2, 3)
                    var_axes = (var_axes[1], var_axes[0])
                # argument axes precede the predicate axis in the target
                # layout, so move the state axis last before reshaping
                stacked = np.moveaxis(table, 1, -1)
                axes = tuple(var_axes) + (dyn_axis[i],)
                shape = [self.T] + [1] * self.num_axes
                for ax, size in zip(axes, stacked.shape[1:]):
                    shape[1 + ax] = size
                E = E + np.ascontiguousarray(stacked).reshape(shape)
        return E

    def _masks(self):
        init = np.zeros(self.shape)
        accept = np.zeros(self.shape)
        for n, atom_i in enumerate(self.dynamic):
            model = self.models[atom_i]
            for target, allowed in ((init, model.initial),
                                    (accept, model.accepting)):
                vec = np.full(model.num_states, NEG_INF)
                vec[list(allowed)] = 0.0
                shape = [1] * self.num_axes
                shape[self.V + n] = model.num_states
                target += vec.reshape(shape)
        return init, accept

    def axis_matrix(self, t: int, axis: int) -> np.ndarray:
        """Pairwise transition scores into frame t along one axis."""
        if axis < self.V:
            return self.G[t - 1]
        return self.trans[axis - self.V]


def _relax(A: np.ndarray, M: np.ndarray, axis: int) -> np.ndarray:
    """max-plus product along one composite axis."""
    moved = np.moveaxis(A, axis, -1)
    out = (moved[..., :, None] + M).max(axis=-2)
    return np.moveaxis(out, -1, axis)


# ---------------------------------------------------------------------------
# exact DP

# Ties between equally scored paths are broken toward the lexicographically
# smallest one.  Mathematically tied paths can drift apart by float rounding
# (the DP and the oracle accumulate terms in different orders), so "tied"
# means equal within this tolerance; genuinely different paths are separated
# by far more than it.
TIE_TOL = 1e-6


def _first_argmax(values: np.ndarray, tol: float = TIE_TOL) -> int:
    """Index (C-order) of the first entry within ``tol`` of the maximum."""
    flat = values.reshape(-1)
    return int(np.flatnonzero(flat >= flat.max() - tol)[0])


def _solve(problem: _Problem) -> tuple[float, list[tuple[int, ...]]]:
    T = problem.T
    # backward pass: beta[t] = best score obtainable after frame t
    beta = [None] * T
    beta[T - 1] = problem.accept_mask
    for t in range(T - 1, 0, -1):
        M = problem.emit[t] + beta[t]
        for axis in range(problem.num_axes):
            M = _relax(M, problem.axis_matrix(t, axis).T, axis)
        beta[t - 1] = M

    first = problem.emit[0] + problem.init_mask
    best = float((first + beta[0]).max())
    if best == NEG_INF:
        return NEG_INF, [tuple([0] * problem.num_axes)] * T

    # front-greedy argmax: at each frame pick the C-order-smallest state
    # consistent with an optimal completion
    path = []
    flat = _first_argmax(first + beta[0])
    state = np.unravel_index(flat, problem.shape)
    path.append(state)
    prefix = float(first[state])
    for t in range(1, T):
        step = np.zeros(problem.shape)
        for axis in range(problem.num_axes):
            row = problem.axis_matrix(t, axis)[path[-1][axis]]
            shape = [1] * problem.num_axes
            shape[axis] = len(row)
            step = step + row.reshape(shape)
        cand = prefix + step + problem.emit[t] + beta[t]
        flat = _first_argmax(cand)
        state = np.unravel_index(flat, problem.shape)
        path.append(state)
        prefix = prefix + float(step[state]) + float(problem.emit[t][state])
    return best, path


def _atom_states(problem: _Problem, path) -> list[list[int]]:
    states = []
    dyn_axis = {atom_i: problem.V + n
                for n, atom_i in enumerate(problem.dynamic)}
    for i in range(len(problem.models)):
        if i in dyn_axis:
            ax = dyn_axis[i]
            states.append([int(s[ax]) for s in path])
        else:
            states.append([0] * problem.T)
    return states


def _breakdown(problem: _Problem, library: PredicateLibrary, path):
    pack = problem.pack
    out = {"detection": 0.0, "motion": 0.0, "observation": 0.0,
           "transition": 0.0}
    det_paths = [[int(s[v]) for s in path] for v in range(problem.V)]
    state_paths = _atom_states(problem, path)
    for v in range(problem.V):
        for t in range(problem.T):
            out["detection"] += float(pack.conf[t, det_paths[v][t]])
            if t:
                out["motion"] += float(
                    problem.G[t - 1][det_paths[v][t - 1], det_paths[v][t]])
    for i, (atom, model) in enumerate(zip(problem.branch.atoms,
                                          problem.models)):
        table = model.observation_tables(library.config, pack)
        args = problem.branch.theta[i]
        trans = model.log_transition
        for t in range(problem.T):
            k = state_paths[i][t]
            idx = (t, k) + tuple(det_paths[v][t] for v in args)
            out["observation"] += float(table[idx])
            if t:
                out["transition"] += float(trans[state_paths[i][t - 1], k])
    return out, det_paths, state_paths


def score_branch(branch: ConjunctiveBranch, trace: VideoTrace | FeaturePack,
                 library: PredicateLibrary | None = None,
                 bandwidth: float = DEFAULT_BANDWIDTH) -> MapResult:
    """Exact joint MAP score of one conjunctive branch against a trace."""
    library = library or build_library()
    pack = trace if isinstance(trace, FeaturePack) else pack_features(trace.frames)
    problem = _Problem(branch, pack, library, bandwidth)
    total, path = _solve(problem)
    if total == NEG_INF:
        return MapResult(NEG_INF,
                         [[0] * problem.T for _ in range(problem.V)],
                         [[0] * problem.T for _ in problem.models],
                         {"detection": NEG_INF, "motion": 0.0,
                          "observation": 0.0, "transition": 0.0},
                         [v.name for v in branch.variables],
                         [str(a) for a in branch.atoms])
    breakdown, det_paths, state_paths = _breakdown(problem, library, path)
    return MapResult(total, det_paths, state_paths, breakdown,
                     [v.name for v in branch.variables],
                     [str(a) for a in branch.atoms])


# ---------------------------------------------------------------------------
# exhaustive oracle


def brute_force_cost(branch: ConjunctiveBranch,
                     trace: VideoTrace | FeaturePack,
                     library: PredicateLibrary | None = None) -> int:
    """Number of composite state sequences the oracle would enumerate."""
    library = library or build_library()
    pack = trace if isinstance(trace, FeaturePack) else pack_features(trace.frames)
    problem = _Problem(branch, pack, library, DEFAULT_BANDWIDTH)
    return int(np.prod(problem.shape)) ** problem.T


def brute_force_score(branch: ConjunctiveBranch,
                      trace: VideoTrace | FeaturePack,
                      library: PredicateLibrary | None = None,
                      bandwidth: float = DEFAULT_BANDWIDTH) -> MapResult:
    """Enumerate every composite state sequence; first strict maximum wins
    (equivalently: the lexicographically smallest argmax)."""
    library = library or build_library()
    pack = trace if isinstance(trace, FeaturePack) else pack_features(trace.frames)
    problem = _Problem(branch, pack, library, bandwidth)
    N = int(np.prod(problem.shape))
    if N ** problem.T > BRUTE_FORCE_CAP:
        raise InferenceError(
            f"{N}^{problem.T} sequences exceed the oracle cap")

    emit = problem.emit.reshape(problem.T, N)
    init = problem.init_mask.reshape(N)
    accept = problem.accept_mask.reshape(N)
    # flattened composite index -> per-axis indices, [num_axes, N]
    decode = np.stack(np.unravel_index(np.arange(N), problem.shape))

    def full_transition(t):
        M = np.zeros((N, N))
        for ax in range(problem.num_axes):
            d = decode[ax]
            M += problem.axis_matrix(t, ax)[d[:, None], d[None, :]]
        return M

    # score every composite state sequence explicitly: grow a tensor with
    # one axis per frame, then take its first (C-order, i.e. lex-smallest)
    # argmax
    with np.errstate(invalid="ignore"):
        cum = init + emit[0]
        for t in range(1, problem.T):
            step = full_transition(t) + emit[t][None, :]
            cum = cum[..., :, None] + step.reshape(
                (1,) * (t - 1) + (N, N))
        cum = cum + accept.reshape((1,) * (problem.T - 1) + (N,))

    best_total = float(cum.max())
    if best_total == NEG_INF:
        return score_branch(branch, pack, library, bandwidth)  # all -inf
    best_seq = np.unravel_index(_first_argmax(cum), cum.shape)
    path = [np.unravel_index(int(i), problem.shape) for i in best_seq]
    breakdown, det_paths, state_paths = _breakdown(problem, library, path)
    return MapResult(float(best_total), det_paths, state_paths, breakdown,
                     [v.name for v in branch.variables],
                     [str(a) for a in branch.atoms])


# ---------------------------------------------------------------------------
# beam variant: prune each frame's detection lattice before the exact DP


def beam_score(branch: ConjunctiveBranch, trace: VideoTrace,
               library: PredicateLibrary | None = None,
               beam_width: int = 4,
               bandwidth: float = DEFAULT_BANDWIDTH) -> MapResult:
    """Joint MAP over the top-``beam_width`` detections per frame.

    Restricting the lattice can only remove candidate paths, so the beam
    total is a lower bound on the exact total, with equality (and an
    identical argmax) whenever the beam covers every detection.
    """
    if beam_width < 1:
        raise InferenceError("beam_width must be positive")
    library = library or build_library()
    kept_frames, index_maps = [], []
    for frame in trace.frames:
        order = sorted(range(len(frame)),
                       key=lambda i: (-frame[i].confidence, i))
        keep = sorted(order[:beam_width])
        kept_frames.append([frame[i] for i in keep])
        index_maps.append(keep)
    pack = pack_features(kept_frames)
    result = score_branch(branch, pack, library, bandwidth)
    result.detections = [
        [index_maps[t][j] for t, j in enumerate(var_path)]
        for var_path in result.detections]
    return result


# ---------------------------------------------------------------------------
# formula-level scoring


def score_formula(formula: Formula, trace: VideoTrace | FeaturePack,
                  library: PredicateLibrary | None = None,
                  bandwidth: float = DEFAULT_BANDWIDTH,
                  scorer=score_branch) -> FormulaResult:
    """Max over the formula's DNF branches; ties break to the lowest
    branch index."""
    library = library or build_library()
    grounded = name_to_person(formula)
    branches = normalize(grounded)
    if not branches:
        raise InferenceError("formula has no conjunctive branches")
    best = None
    totals = []
    for i, branch in enumerate(branches):
        result = scorer(branch, trace, library, bandwidth=bandwidth)
        totals.append(result.total)
        if best is None or result.total > best[0]:
            best = (result.total, i, branch, result)
    return FormulaResult(best[0], best[1], best[2], best[3], totals)


def _canonical_branch(branch: ConjunctiveBranch):
    """Atom multiset with variables renamed by first occurrence."""
    names = {v: f"_{i}" for i, v in enumerate(branch.variables)}
    return frozenset(
        (a.predicate, tuple(names[arg] for arg in a.args))
        for a in branch.atoms)


def score_common(formulas: list[Formula], trace: VideoTrace | FeaturePack,
                 library: PredicateLibrary | None = None,
                 bandwidth: float = DEFAULT_BANDWIDTH) -> MapResult:
    """Score the atoms shared by every branch of every formula.

    Interpretations of one sentence typically agree on most of their
    atoms; this scores that common core (after canonical variable
    renaming).  Raises InferenceError when nothing is shared.
    """
    if not formulas:
        raise InferenceError("no formulas given")
    all_branches = []
    for f in formulas:
        all_branches.extend(normalize(name_to_person(f)))
    shared = set(_canonical_branch(all_branches[0]))
    for b in all_branches[1:]:
        shared &= _canonical_branch(b)
    if not shared:
        raise InferenceError("the formulas share no atoms")
    reference = all_branches[0]
    names = {v: f"_{i}" for i, v in enumerate(reference.variables)}
    atoms = [a for a in reference.atoms
             if (a.predicate, tuple(names[arg] for arg in a.args)) in shared]
    variables = []
    for a in atoms:
        for arg in a.args:
            if arg not in variables:
                variables.append(arg)
    branch = ConjunctiveBranch(variables, atoms)
    return score_branch(branch, trace, library, bandwidth)
