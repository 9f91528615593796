"""Anti-edges and anti-vertices: asking for what is *not* there.

An anti-edge forbids an edge between two matched vertices. An anti-vertex
forbids a common neighbour of the vertices it is attached to. Both are
checked with set differences while matching, so no match is found and then
thrown away.
"""

from __future__ import annotations

from patternmine import DataGraph, count
from patternmine.pattern import Pattern, format_pattern, generate_chain

# triangle 0-1-2; vertex 3 closes a second triangle over the edge 0-1;
# vertex 5 hangs off 4 which hangs off 2
G = DataGraph.from_edges([(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 4), (4, 5)])


def main() -> None:
    path = generate_chain(3)
    print("3-vertex paths")
    print("  edge-induced  ", count(path, G, mode="edge"))
    # vertex-induced matching is edge-induced matching of the same pattern with
    # an anti-edge on every non-adjacent pair
    print("  vertex-induced", count(path, G, mode="vertex"))
    print("  as anti-edges ", count(path.to_vertex_induced_equivalent(), G))

    # an open square: a 4-cycle whose diagonal u2-u4 must be absent
    square = Pattern.from_edges([(1, 2), (2, 3), (3, 4), (4, 1)], [(2, 4)])
    print("\npattern with an anti-edge:\n" + format_pattern(square))
    print("matches:", count(square, G))

    # a triangle with no outside vertex adjacent to both u1 and u3
    lonely = Pattern.from_edges([(1, 2), (2, 3), (1, 3)], [(1, 4), (3, 4)])
    print("\ntriangles with an anti-vertex on one side")
    print("  plain triangles      ", count(Pattern.from_edges([(1, 2), (2, 3), (1, 3)]), G))
    # each of the two triangles is matched twice: the constrained pair can be
    # any of its edges except 0-1, whose ends share a neighbour outside it
    print("  with the anti-vertex ", count(lonely, G))


if __name__ == "__main__":
    main()
