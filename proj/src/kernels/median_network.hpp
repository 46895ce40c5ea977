#pragma once

// Paeth's 19-exchange median-of-9 network. Op is any type providing
// lo(a,b) and hi(a,b); the scalar and vector kernels share this ordering.

namespace pxa::kernels::detail {

template <class Ops, class V>
inline V median9(const Ops& op, V p0, V p1, V p2, V p3, V p4, V p5, V p6, V p7, V p8) {
    auto sort2 = [&](V& a, V& b) {
        V t = op.lo(a, b);
        b = op.hi(a, b);
        a = t;
    };
    sort2(p1, p2); sort2(p4, p5); sort2(p7, p8);
    sort2(p0, p1); sort2(p3, p4); sort2(p6, p7);
    sort2(p1, p2); sort2(p4, p5); sort2(p7, p8);
    sort2(p0, p3); sort2(p5, p8); sort2(p4, p7);
    sort2(p3, p6); sort2(p1, p4); sort2(p2, p5);
    sort2(p4, p7); sort2(p4, p2); sort2(p6, p4);
    sort2(p4, p2);
    return p4;
}

}  // namespace pxa::kernels::detail
