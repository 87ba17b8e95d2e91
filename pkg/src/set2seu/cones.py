"""Fan-in cones of flip-flops and collapsed SET fault-site enumeration.

A transient on a combinational net can only upset the flip-flops whose
fan-in cones contain that net.  Cones stop at primary inputs and at other
flip-flops' Q outputs; those boundary nets form the cone's support.

Fault sites are collapsed to fan-out stems plus flip-flop D nets: every
net inside a fan-out-free region is represented by the region's head, and
the head's achievable upset patterns over-approximate the region's.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import Circuit, NetlistError

STEM = "stem"
FFR_TERMINAL = "ffr_terminal"


@dataclass(frozen=True)
class FaninCone:
    ff_id: int
    member_nets: frozenset[int]
    support: frozenset[int]


@dataclass(frozen=True)
class FaultSite:
    site_net: int
    kind: str                      # STEM or FFR_TERMINAL
    represented_nets: frozenset[int]
    static_ffs: tuple[int, ...]    # sorted ff ids reachable from site_net
    po_only: bool                  # reaches primary outputs (or nothing) but no FF


def extract_fanin_cone(c: Circuit, ff_id: int) -> FaninCone:
    """Backward closure from the FF's D net.

    member_nets: the D net plus every gate-output net feeding it without
    crossing a flip-flop.  support: the PI / FF-Q boundary nets feeding the
    cone (disjoint from member_nets; empty when the D net itself is the
    boundary).
    """
    d = c.flipflops[ff_id].d_net
    members: set[int] = {d}
    support: set[int] = set()
    stack = [d]
    seen = {d}
    while stack:
        net = stack.pop()
        kind, idx = c.driver[net]
        if kind != "gate":
            if net != d:
                support.add(net)
            continue
        members.add(net)
        for src in c.gates[idx].inputs:
            if src not in seen:
                seen.add(src)
                stack.append(src)
    return FaninCone(ff_id, frozenset(members), frozenset(support))


def all_cones(c: Circuit) -> tuple[FaninCone, ...]:
    # memoized on the circuit instance (immutable, so always valid)
    cached = c.__dict__.get("_all_cones")
    if cached is None:
        cached = tuple(extract_fanin_cone(c, f.id) for f in c.flipflops)
        c.__dict__["_all_cones"] = cached
    return cached


def cone_closure(cone: FaninCone) -> frozenset[int]:
    """All nets whose transient can reach this FF: members plus support."""
    return cone.member_nets | cone.support


def static_ff_set(c: Circuit, net: int) -> tuple[int, ...]:
    """Sorted FF ids reachable forward from `net` without crossing a FF."""
    if not 0 <= net < c.num_nets:
        raise NetlistError(f"unknown net id {net}")
    return _decode_mask(c.ff_reach[net])


def cone_ff_set(c: Circuit, ff_id: int) -> tuple[int, ...]:
    """FFs a transient anywhere inside cone(ff_id) could reach.

    Equals {g : cone(g) intersects cone(ff_id)}; this is the per-cone
    upset set (worst case over the cone's nets).
    """
    cone = all_cones(c)[ff_id]
    mask = 0
    for net in cone.member_nets | cone.support:
        mask |= c.ff_reach[net]
    return _decode_mask(mask)


def _decode_mask(mask: int) -> tuple[int, ...]:
    out = []
    f = 0
    while mask:
        if mask & 1:
            out.append(f)
        mask >>= 1
        f += 1
    return tuple(out)


def _region_heads(c: Circuit) -> dict[int, int]:
    """Map each SET-eligible net to its fan-out-free region head.

    A net is its own head when it has fan-out >= 2 (stem), drives a FF D
    pin, or has no gate/FF sink at all (dangling or PO-only).  Otherwise it
    has exactly one gate sink and inherits that gate's output's head.
    """
    heads: dict[int, int] = {}

    def head_of(net: int) -> int:
        path = []
        cur = net
        while cur not in heads:
            if c.fanout_count[cur] != 1 or c.fanout_ffs[cur]:
                heads[cur] = cur
                break
            path.append(cur)
            cur = c.gates[c.fanout_gates[cur][0]].output
        h = heads[cur]
        for n in path:
            heads[n] = h
        return h

    for net in range(c.num_nets):
        if c.is_combinational(net):
            head_of(net)
    return heads


def enumerate_fault_sites(c: Circuit, mode: str = "collapsed") -> list[FaultSite]:
    """List SET fault sites, sorted by net id.

    collapsed: fan-out stems plus FF D nets; each also carries the nets of
    the fan-out-free region it represents.  all_nets: every PI / gate
    output net individually.  Excluded nets never appear as sites nor in
    represented regions.
    """
    if mode not in ("collapsed", "all_nets"):
        raise ValueError(f"unknown mode '{mode}'")
    universe = [
        n for n in range(c.num_nets) if c.is_combinational(n) and n not in c.excluded
    ]
    sites: list[FaultSite] = []
    if mode == "all_nets":
        for net in universe:
            sites.append(_make_site(c, net, frozenset({net})))
        return sites

    heads = _region_heads(c)
    regions: dict[int, set[int]] = {}
    for net in universe:
        regions.setdefault(heads[net], set()).add(net)
    for head in sorted(regions):
        if head in c.excluded:
            # region head itself excluded: fall back to per-net sites so the
            # remaining region nets stay covered
            for net in sorted(regions[head] - {head}):
                sites.append(_make_site(c, net, frozenset({net})))
            continue
        sites.append(_make_site(c, head, frozenset(regions[head])))
    sites.sort(key=lambda s: s.site_net)
    return sites


def _make_site(c: Circuit, net: int, region: frozenset[int]) -> FaultSite:
    ffs = static_ff_set(c, net)
    kind = FFR_TERMINAL if c.fanout_ffs[net] else STEM
    return FaultSite(
        site_net=net,
        kind=kind,
        represented_nets=region,
        static_ffs=ffs,
        po_only=not ffs,
    )


def site_support(c: Circuit, site: FaultSite) -> tuple[int, ...]:
    """Free inputs governing the site's fault behaviour.

    PIs and FF Q nets inside the union of the affected flip-flops' cone
    closures; these are the variables the good/faulty comparison is
    quantified over.
    """
    cones = all_cones(c)
    free: set[int] = set()
    for f in site.static_ffs:
        for net in cone_closure(cones[f]):
            if c.driver[net][0] != "gate":
                free.add(net)
    return tuple(sorted(free))


def relevant_closure(c: Circuit, site: FaultSite) -> frozenset[int]:
    """Union of the affected FFs' cone closures (the analysis region)."""
    cones = all_cones(c)
    nets: set[int] = set()
    for f in site.static_ffs:
        nets |= cone_closure(cones[f])
    return frozenset(nets)


# -- JSON views -----------------------------------------------------------


def cones_to_json(c: Circuit) -> list[dict]:
    rows = []
    for cone in all_cones(c):
        rows.append(
            {
                "ff": c.flipflops[cone.ff_id].name,
                "member_nets": sorted(c.net_names[n] for n in cone.member_nets),
                "support": sorted(c.net_names[n] for n in cone.support),
            }
        )
    return rows


def sites_to_json(c: Circuit, sites: list[FaultSite]) -> list[dict]:
    return [
        {
            "site_net": c.net_names[s.site_net],
            "kind": s.kind,
            "po_only": s.po_only,
            "represented_nets": sorted(c.net_names[n] for n in s.represented_nets),
            "static_ffs": [c.flipflops[f].name for f in s.static_ffs],
        }
        for s in sites
    ]
