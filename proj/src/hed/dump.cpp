#include "hedcheck/hed.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace hedcheck {

namespace {

// Colex order from the top variable down: 24 < z < y < y*z < x < x*z for x > y > z.
bool monomial_less(const Monomial& a, const Monomial& b) {
    auto ia = a.rbegin();
    auto ib = b.rbegin();
    for (; ia != a.rend() && ib != b.rend(); ++ia, ++ib) {
        if (ia->first != ib->first) return index(ia->first) < index(ib->first);
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.rend() && ib != b.rend();
}

} // namespace

std::string format_polynomial(const Manager& m, const Polynomial& p, std::size_t max_terms) {
    if (p.empty()) return "0";
    std::vector<const Polynomial::value_type*> terms;
    for (const auto& t : p) terms.push_back(&t);
    std::sort(terms.begin(), terms.end(),
              [](const auto* a, const auto* b) { return monomial_less(a->first, b->first); });

    std::ostringstream out;
    std::size_t printed = 0;
    for (const auto* t : terms) {
        if (max_terms != 0 && printed == max_terms) {
            out << " ... (+" << (terms.size() - printed) << " more terms)";
            break;
        }
        const BigInt& c = t->second;
        if (printed == 0)
            out << c;
        else
            out << (c < 0 ? " - " : " + ") << abs(c);
        for (auto it = t->first.rbegin(); it != t->first.rend(); ++it) {
            out << '*' << m.var_name(it->first);
            if (it->second > 1) out << '^' << it->second;
        }
        ++printed;
    }
    return out.str();
}

std::string format_ref(const Manager& m, const HedRef& r, std::size_t max_terms) {
    return format_polynomial(m, m.to_polynomial(r), max_terms);
}

void write_dot(const Manager& m, const HedRef& root, std::ostream& out) {
    out << "digraph hed {\n";
    out << "  root [shape=point];\n";
    std::set<NodeId> seen;
    std::vector<NodeId> stack{root.node};
    auto node_name = [](NodeId n) { return "n" + std::to_string(n); };
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (m.is_terminal(n)) {
            out << "  " << node_name(n) << " [shape=box,label=\"" << (n == kOneNode ? 1 : 0) << "\"];\n";
            continue;
        }
        out << "  " << node_name(n) << " [shape=circle,label=\"" << m.var_name(m.node_var(n)) << "\"];\n";
        HedRef lo = m.const_edge(n);
        HedRef hi = m.linear_edge(n);
        if (!lo.is_zero()) {
            out << "  " << node_name(n) << " -> " << node_name(lo.node) << " [style=dashed,label=\"" << lo.weight
                << "\"];\n";
            stack.push_back(lo.node);
        }
        out << "  " << node_name(n) << " -> " << node_name(hi.node) << " [style=solid,label=\"" << hi.weight
            << "\"];\n";
        stack.push_back(hi.node);
    }
    out << "  root -> " << node_name(root.node) << " [label=\"" << root.weight << "\"];\n";
    out << "}\n";
}

} // namespace hedcheck
