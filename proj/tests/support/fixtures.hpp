#pragma once

// Shared fixtures: the small two-type worked example used across suites
// (objects A,B with one discrete attribute; elements C,D,E; binary edges R
// and one ternary edge F), plus tiny helpers.

#include <string>

namespace fixtures {

// Hypergraph: R(A,C), R(A,D), R(B,E), F(A,B,D). A's depth-1 neighbourhood
// is {B,C,D} with edge labels {(F,1),(R,1),(R,1)}.
inline const std::string worked_example = R"(
# two object vertices with attributes, three plain elements
vertex_type object Attr1:discrete
vertex_type element
edge_type R 2
edge_type F 3
target object
v object A Attr1=X
v object B Attr1=Y
v element C
v element D
v element E
e R A C
e R A D
e R B E
e F A B D
label A c1
label B c2
)";

inline const std::string tiny_example = R"(
vertex_type Person gender:discrete age:continuous
edge_type Friends 2
target Person
v Person john gender=m age=23
v Person lisa gender=f
e Friends john lisa
label john student
)";

} // namespace fixtures
