#include "nernst/thermo.hpp"

namespace nernst {

NernstReport nernst_check(const SpectrumModel& model, double x1, double x2)
{
    const int g1 = model.ground_degeneracy(x1);
    const int g2 = model.ground_degeneracy(x2);
    NernstReport report;
    report.zero_entropy_1 = std::log(static_cast<double>(g1));
    report.zero_entropy_2 = std::log(static_cast<double>(g2));
    if (model.family() == Family::Custom)
        report.holds = std::abs(report.zero_entropy_1 - report.zero_entropy_2) <= 1e-12;
    else
        report.holds = g1 == g2;
    return report;
}

bool planck_check(const SpectrumModel& model, double x)
{
    return model.ground_degeneracy(x) == 1;
}

} // namespace nernst
