"""The collect-to-pivot message schedule shared by the numeric inference
engine and the symbolic compiler.

Both callers plug in their own multiply/marginalize; everything about
*when* an operation happens is decided here, once:

- cluster potentials are prepared by the caller in ascending cluster id,
- messages flow toward the pivot in depth-first post-order, children
  visited in ascending cluster id,
- a message from i to j multiplies [psi_i, incoming messages except j's]
  and sums out everything outside the separator,
- the pivot posterior multiplies [psi_pivot, all incoming messages].

Marginalization keeps only separator variables actually present in a
product's scope; variables absent from every factor on this side of the
edge are constant directions and are summed where they genuinely occur.
"""

from __future__ import annotations

from typing import Callable

from .jointree import JoinTree
from .potentials import Potential


def collect_posterior(
    jt: JoinTree,
    pivot: int,
    psi: list[Potential],
    multiply: Callable,
    marginalize: Callable,
    message_cache: dict[tuple[int, int], Potential],
    posterior_cache: dict[int, Potential],
) -> Potential:
    """Posterior potential of the pivot cluster.  Caches are caller-owned
    so repeated queries reuse per-edge messages."""
    if pivot in posterior_cache:
        return posterior_cache[pivot]
    adj = jt.adjacency()

    # edges (i -> parent) in depth-first post-order, ascending children first
    order: list[tuple[int, int]] = []
    stack: list[tuple[int, int | None, list[int], int]] = [(pivot, None, adj[pivot], 0)]
    while stack:
        node, parent, children, k = stack.pop()
        while k < len(children) and children[k] == parent:
            k += 1
        if k < len(children):
            stack.append((node, parent, children, k + 1))
            stack.append((children[k], node, adj[children[k]], 0))
        elif parent is not None:
            order.append((node, parent))

    for i, j in order:
        if (i, j) in message_cache:
            continue
        incoming = [message_cache[(k, i)] for k in adj[i] if k != j]
        product = multiply([psi[i]] + incoming)
        sep = jt.separator(i, j)
        keep = {v for v in product.scope if v in sep}
        message_cache[(i, j)] = marginalize(product, keep)

    incoming = [message_cache[(k, pivot)] for k in adj[pivot]]
    posterior = multiply([psi[pivot]] + incoming)
    posterior_cache[pivot] = posterior
    return posterior
