#include "mci33/i3p3.hpp"

namespace mci33 {

Decision decide(int n, int y, const EquivalenceInterval& ei) {
    if (n < 1) throw domain_error("i3+3: no patients treated, no decision");
    if (y < 0 || y > n) throw domain_error("i3+3: need 0 <= y <= n");

    if (compare_ratio(y, n, ei.lower()) < 0) return Decision::Escalate;
    if (compare_ratio(y, n, ei.upper()) <= 0) return Decision::Stay;
    if (compare_ratio(y - 1, n, ei.lower()) < 0) return Decision::Stay;
    return Decision::DeEscalate;
}

}  // namespace mci33
