// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "mapping.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "error.hpp"
#include "io.hpp"

namespace spss::mapping {

void LayoutDescriptors::validate(const surrogate::Bounds& b) const
{
    if (P < 1 || Q < 1 || D < 1 || static_cast<int>(values.size()) != size())
        throw Error(Errc::data, "layout has inconsistent shape");
    if (b.dims() != D) throw Error(Errc::data, "layout and bounds disagree on D");
    for (int d = 0; d < D; ++d)
        for (int q = 0; q < Q; ++q)
            for (int p = 0; p < P; ++p) {
                const double x = at(p, q, d);
                if (!(x >= b.lo[d] && x <= b.hi[d]))
                    throw Error(Errc::data, "descriptor at (" + std::to_string(p + 1) + ", " + std::to_string(q + 1) +
                                                ") outside its bounds");
            }
}

const char* region_name(RegionClass c)
{
    static const char* names[] = {"C0", "C1", "C2", "C3", "C4", "C5", "C6"};
    return names[static_cast<int>(c)];
}

namespace {

void check_sizes(int P, int Q, int Pp, int Qp)
{
    if (Pp < 1 || Qp < 1 || Pp % 2 == 0 || Qp % 2 == 0)
        throw Error(Errc::invalid_argument, "window sizes must be odd");
    if (P < Pp || Q < Qp) throw Error(Errc::invalid_argument, "full-scale layout smaller than the window");
}

} // namespace

RegionClass region_class(int p, int q, int P, int Q, int Pp, int Qp)
{
    check_sizes(P, Q, Pp, Qp);
    if (p < 1 || p > P || q < 1 || q > Q) throw Error(Errc::invalid_argument, "cell index out of range");
    const int hp = (Pp - 1) / 2;
    const int hq = (Qp - 1) / 2;
    const bool p_lo = p <= hp, p_hi = p > P - hp;
    const bool q_lo = q <= hq, q_hi = q > Q - hq;
    const bool p_rim = p_lo || p_hi;
    const bool q_rim = q_lo || q_hi;
    if (p_rim && q_rim) {
        if (p_lo) return q_lo ? RegionClass::C0 : RegionClass::C2;
        return q_lo ? RegionClass::C3 : RegionClass::C1;
    }
    if (p_rim) return RegionClass::C4;
    if (q_rim) return RegionClass::C5;
    return RegionClass::C6;
}

WindowAssignment window_assignment(int p, int q, int P, int Q, int Pp, int Qp)
{
    check_sizes(P, Q, Pp, Qp);
    if (p < 1 || p > P || q < 1 || q > Q) throw Error(Errc::invalid_argument, "cell index out of range");
    WindowAssignment w;
    w.anchor_p = std::clamp(p - (Pp - 1) / 2, 1, P - Pp + 1);
    w.anchor_q = std::clamp(q - (Qp - 1) / 2, 1, Q - Qp + 1);
    w.local_p = p - w.anchor_p + 1;
    w.local_q = q - w.anchor_q + 1;
    return w;
}

surrogate::SmallScaleLayout extract_window(const LayoutDescriptors& g, int anchor_p, int anchor_q, int Pp, int Qp)
{
    if (anchor_p < 1 || anchor_q < 1 || anchor_p + Pp - 1 > g.P || anchor_q + Qp - 1 > g.Q)
        throw Error(Errc::invalid_argument, "window exceeds the layout");
    surrogate::SmallScaleLayout w(Pp, Qp, g.D);
    for (int d = 0; d < g.D; ++d)
        for (int q = 0; q < Qp; ++q)
            for (int p = 0; p < Pp; ++p) w.at(p, q, d) = g.at(anchor_p - 1 + p, anchor_q - 1 + q, d);
    return w;
}

gstc::SusceptibilityField full_scale_susceptibilities(const LayoutDescriptors& g,
                                                      const surrogate::WindowPredictor& twin,
                                                      const em::Lattice& lattice, bool memoize)
{
    if (lattice.P != g.P || lattice.Q != g.Q) throw Error(Errc::invalid_argument, "layout does not match the lattice");
    if (twin.D() != g.D) throw Error(Errc::mismatch, "layout D does not match the surrogate");
    const int Pp = twin.Pp();
    const int Qp = twin.Qp();
    gstc::SusceptibilityField field(lattice);

    // anchor -> (local cells, full-scale cells)
    std::map<std::pair<int, int>, std::pair<std::vector<int>, std::vector<int>>> plan;
    for (int q = 1; q <= g.Q; ++q) {
        for (int p = 1; p <= g.P; ++p) {
            const WindowAssignment w = window_assignment(p, q, g.P, g.Q, Pp, Qp);
            const int local = (w.local_p - 1) + Pp * (w.local_q - 1);
            const int full = lattice.index(p - 1, q - 1);
            if (memoize) {
                auto& e = plan[{w.anchor_q, w.anchor_p}];
                e.first.push_back(local);
                e.second.push_back(full);
            } else {
                const auto cell = twin.predict_cells(extract_window(g, w.anchor_p, w.anchor_q, Pp, Qp), {local});
                field.cells[full] = cell.front();
            }
        }
    }
    for (const auto& [anchor, cells] : plan) {
        const auto pred = twin.predict_cells(extract_window(g, anchor.second, anchor.first, Pp, Qp), cells.first);
        for (std::size_t i = 0; i < pred.size(); ++i) field.cells[cells.second[i]] = pred[i];
    }
    return field;
}

std::string assignment_csv(int P, int Q, int Pp, int Qp)
{
    io::CsvWriter csv({"p", "q", "class", "anchor_p", "anchor_q", "local_p", "local_q"});
    for (int q = 1; q <= Q; ++q) {
        for (int p = 1; p <= P; ++p) {
            const WindowAssignment w = window_assignment(p, q, P, Q, Pp, Qp);
            csv << p << q << std::string(region_name(region_class(p, q, P, Q, Pp, Qp))) << w.anchor_p << w.anchor_q
                << w.local_p << w.local_q;
            csv.end_row();
        }
    }
    return csv.str();
}

} // namespace spss::mapping
