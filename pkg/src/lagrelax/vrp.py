"""Toy capacitated vehicle-routing decomposition.

The visit-once equality constraints are dualized with sign-unrestricted
multipliers pi (one per customer). With an identical fleet every vehicle
faces the same subproblem

    min over nonempty S with demand(S) <= Q of  [tsp(S) + sum_{i in S} pi_i],

where tsp(S) is the optimal depot -> S -> depot route cost from a subset
dynamic program, and the dual bound is K * subproblem - sum_i pi_i <= OPT.
Routes are depot-anchored by construction, so subtours are unrepresentable
and no subtour-elimination machinery is needed at this scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, DomainError, InfeasibleProblemError

MAX_VRP_NODES = 9
MAX_VRP_VEHICLES = 3


@dataclass(frozen=True)
class VrpInstance:
    n_nodes: int  # node 0 is the depot
    cost: np.ndarray  # (n, n) travel costs, zero diagonal
    demand: np.ndarray  # (n - 1,) per-customer demand, positive
    capacity: float
    n_vehicles: int

    def __post_init__(self):
        if not 2 <= self.n_nodes <= MAX_VRP_NODES:
            raise DimensionError(f"n_nodes must be in [2, {MAX_VRP_NODES}]")
        cost = np.asarray(self.cost, dtype=np.float64)
        if cost.shape != (self.n_nodes, self.n_nodes):
            raise DimensionError(f"cost must be {self.n_nodes}x{self.n_nodes}")
        if not np.all(np.isfinite(cost)):
            raise DomainError("cost contains non-finite entries")
        if np.any(np.diag(cost) != 0.0):
            raise DomainError("cost diagonal must be zero")
        cost.setflags(write=False)
        object.__setattr__(self, "cost", cost)
        demand = np.asarray(self.demand, dtype=np.float64).ravel()
        if demand.shape[0] != self.n_nodes - 1:
            raise DimensionError("demand must have one entry per customer")
        if not np.all(np.isfinite(demand)) or np.any(demand <= 0):
            raise DomainError("demands must be positive and finite")
        demand.setflags(write=False)
        object.__setattr__(self, "demand", demand)
        if not self.capacity > 0:
            raise DomainError("capacity must be positive")
        if self.n_vehicles < 1:
            raise DomainError("need at least one vehicle")

    @property
    def n_customers(self) -> int:
        return self.n_nodes - 1


@dataclass(frozen=True)
class VrpRoutePlan:
    value: float
    routes: tuple  # tuple of customer-index tuples (1-based node labels)


@dataclass(frozen=True)
class VrpDualState:
    pi: np.ndarray  # final multipliers
    best_pi: np.ndarray
    best_bound: float
    n_iterations: int
    bound_history: tuple  # f(pi_t) for t = 0..T


def _route_tables(inst: VrpInstance):
    """Held-Karp subset DP over customers: for every nonempty customer
    subset (bitmask) the cheapest depot -> subset -> depot route cost,
    plus pointers to reconstruct one optimal visiting order."""
    nc = inst.n_customers
    cost = inst.cost
    n_masks = 1 << nc
    dp = np.full((n_masks, nc), np.inf)
    parent = np.full((n_masks, nc), -1, dtype=np.int64)
    for j in range(nc):
        dp[1 << j, j] = cost[0, j + 1]
    for mask in range(1, n_masks):
        for j in range(nc):
            if not (mask >> j) & 1:
                continue
            prev_mask = mask ^ (1 << j)
            if prev_mask == 0:
                continue  # base case dp[{j}, j] already set
            best = np.inf
            arg = -1
            for i in range(nc):
                if (prev_mask >> i) & 1:
                    cand = dp[prev_mask, i] + cost[i + 1, j + 1]
                    if cand < best:
                        best = cand
                        arg = i
            dp[mask, j] = best
            parent[mask, j] = arg
    closing = dp + cost[1:, 0][None, :]  # add the return leg cost(j+1 -> depot)
    tsp = np.full(n_masks, np.inf)
    last = np.full(n_masks, -1, dtype=np.int64)
    for mask in range(1, n_masks):
        j = int(np.argmin(closing[mask]))
        tsp[mask] = closing[mask, j]
        last[mask] = j
    return tsp, last, parent


def _reconstruct_route(mask: int, last, parent) -> tuple:
    order = []
    j = int(last[mask])
    while mask:
        order.append(j + 1)  # customer index -> node label
        nj = int(parent[mask, j])
        mask ^= 1 << j
        j = nj
    order.reverse()
    return tuple(order)


def _capacity_ok_masks(inst: VrpInstance) -> np.ndarray:
    nc = inst.n_customers
    masks = np.arange(1, 1 << nc)
    loads = (((masks[:, None] >> np.arange(nc)[None, :]) & 1) * inst.demand[None, :]).sum(axis=1)
    return masks[loads <= inst.capacity]


def vrp_vehicle_subproblem(inst: VrpInstance, pi) -> tuple[tuple, float]:
    """Best single-vehicle route against reduced prices: minimizes
    tsp(S) + sum_{i in S} pi_i over nonempty capacity-feasible S.
    Returns (route as node labels, value)."""
    pi = np.asarray(pi, dtype=np.float64).ravel()
    if pi.shape[0] != inst.n_customers:
        raise DimensionError("pi must have one entry per customer")
    feasible = _capacity_ok_masks(inst)
    if feasible.size == 0:
        raise InfeasibleProblemError("no single customer fits the vehicle capacity")
    tsp, last, parent = _route_tables(inst)
    nc = inst.n_customers
    members = ((feasible[:, None] >> np.arange(nc)[None, :]) & 1).astype(np.float64)
    scores = tsp[feasible] + members @ pi
    i = int(np.argmin(scores))  # first minimizer: deterministic tie-break by mask order
    best_mask = int(feasible[i])
    route = _reconstruct_route(best_mask, last, parent)
    return route, float(scores[i])


def vrp_dual_bound(inst: VrpInstance, pi) -> float:
    """Lagrangian bound f(pi) = K * subproblem(pi) - sum_i pi_i <= OPT."""
    pi = np.asarray(pi, dtype=np.float64).ravel()
    _, sub_value = vrp_vehicle_subproblem(inst, pi)
    return inst.n_vehicles * sub_value - float(pi.sum())


def vrp_opt_bruteforce(inst: VrpInstance) -> VrpRoutePlan:
    """Exact optimum over customer-to-vehicle assignments (every vehicle
    serves a nonempty, capacity-feasible set; per-vehicle order by DP)."""
    if inst.n_vehicles > MAX_VRP_VEHICLES:
        raise ConfigError(f"brute force limited to {MAX_VRP_VEHICLES} vehicles")
    nc = inst.n_customers
    K = inst.n_vehicles
    if K > nc:
        raise InfeasibleProblemError("more vehicles than customers (routes must be nonempty)")
    tsp, last, parent = _route_tables(inst)
    masks_all = np.arange(1 << nc)
    loads = (((masks_all[:, None] >> np.arange(nc)[None, :]) & 1) * inst.demand[None, :]).sum(
        axis=1
    )
    best_val = np.inf
    best_masks = None
    # assignment vector: customer i -> vehicle (code digit i, base K)
    for code in range(K**nc):
        masks = [0] * K
        rem = code
        for i in range(nc):
            masks[rem % K] |= 1 << i
            rem //= K
        ok = True
        total = 0.0
        for msk in masks:
            if msk == 0 or loads[msk] > inst.capacity:
                ok = False
                break
            total += float(tsp[msk])
        if ok and total < best_val:
            best_val = total
            best_masks = tuple(masks)
    if best_masks is None:
        raise InfeasibleProblemError("no capacity-feasible assignment exists")
    routes = tuple(_reconstruct_route(msk, last, parent) for msk in best_masks)
    return VrpRoutePlan(value=best_val, routes=routes)


def vrp_dual_ascent(
    inst: VrpInstance,
    iterations: int,
    step_scale: float = 1.0,
    schedule: str = "decreasing",
) -> VrpDualState:
    """Subgradient ascent on f(pi) from pi = 0 with g_i = K*[i in S*] - 1
    (multipliers are sign-unrestricted: the dualized rows are equalities).
    Evaluates f at pi_0 and after each of the T updates."""
    if iterations < 0:
        raise ConfigError("iterations must be >= 0")
    if schedule not in ("decreasing", "constant"):
        raise ConfigError(f"unknown step schedule {schedule!r}")
    if not step_scale > 0:
        raise DomainError("step_scale must be positive")
    nc = inst.n_customers
    pi = np.zeros(nc)
    history = []
    best_bound = -np.inf
    best_pi = pi.copy()
    for t in range(iterations + 1):
        route, sub_value = vrp_vehicle_subproblem(inst, pi)
        f_val = inst.n_vehicles * sub_value - float(pi.sum())
        history.append(f_val)
        if f_val > best_bound:
            best_bound = f_val
            best_pi = pi.copy()
        if t == iterations:
            break
        visits = np.zeros(nc)
        for node in route:
            visits[node - 1] = inst.n_vehicles
        g = visits - 1.0
        eta = step_scale / np.sqrt(t + 1) if schedule == "decreasing" else step_scale
        pi = pi + eta * g
    return VrpDualState(
        pi=pi,
        best_pi=best_pi,
        best_bound=best_bound,
        n_iterations=iterations,
        bound_history=tuple(history),
    )


def random_vrp_instance(
    n_nodes: int,
    n_vehicles: int,
    rng: np.random.Generator,
    capacity: float | None = None,
) -> VrpInstance:
    """Random Euclidean toy instance (points in the unit square, integer
    demands 1..3). When capacity is not given, one is drawn and the draw is
    retried until the instance admits a feasible assignment."""
    for _ in range(64):
        pts = rng.uniform(0.0, 1.0, size=(n_nodes, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        cost = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(cost, 0.0)
        demand = rng.integers(1, 4, size=n_nodes - 1).astype(np.float64)
        if capacity is not None:
            q = capacity
        else:
            lo = float(demand.max())
            hi = float(demand.sum())
            q = float(rng.uniform(lo, hi)) if hi > lo else lo
        inst = VrpInstance(
            n_nodes=n_nodes, cost=cost, demand=demand, capacity=q, n_vehicles=n_vehicles
        )
        try:
            vrp_opt_bruteforce(inst)
        except InfeasibleProblemError:
            continue
        return inst
    raise InfeasibleProblemError("could not draw a feasible toy instance in 64 attempts")
