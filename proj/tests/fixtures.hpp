#pragma once

#include <string>
#include <vector>

#include "delib/network.hpp"

namespace fixture {

inline delib::Variable var(std::string name, std::vector<delib::VarId> parents, std::vector<double> cpt,
                           std::vector<std::string> states = {"t", "f"}) {
    return {std::move(name), std::move(states), std::move(parents), std::move(cpt)};
}

// A -> B, A -> C, B -> D, C -> D; every variable binary, state 0 = "t".
inline delib::BeliefNetwork diamond(double p_a = 0.7) {
    delib::BeliefNetwork net;
    net.name = "diamond";
    net.variables = {
        var("A", {}, {p_a, 1.0 - p_a}),
        var("B", {0}, {0.8, 0.2, 0.3, 0.7}),
        var("C", {0}, {0.4, 0.6, 0.9, 0.1}),
        var("D", {1, 2}, {0.95, 0.05, 0.6, 0.4, 0.5, 0.5, 0.05, 0.95}),
    };
    return net;
}

inline delib::BeliefNetwork chain3() {
    delib::BeliefNetwork net;
    net.name = "chain";
    net.variables = {
        var("A", {}, {0.3, 0.7}),
        var("B", {0}, {0.9, 0.1, 0.2, 0.8}),
        var("C", {1}, {0.5, 0.5, 0.25, 0.75}),
    };
    return net;
}

// X -> Y <- Z, Y -> W: a polytree.
inline delib::BeliefNetwork polytree() {
    delib::BeliefNetwork net;
    net.name = "polytree";
    net.variables = {
        var("X", {}, {0.6, 0.4}),
        var("Z", {}, {0.25, 0.75}),
        var("Y", {0, 1}, {0.9, 0.1, 0.7, 0.3, 0.4, 0.6, 0.05, 0.95}),
        var("W", {2}, {0.8, 0.2, 0.1, 0.9}),
    };
    return net;
}

}  // namespace fixture
