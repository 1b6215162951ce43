#include "hcache/delay.hpp"

#include <cmath>
#include <stdexcept>

namespace hcache {

namespace {

// Cumulative parity fraction counts as complete slightly early so the max
// and piecewise routes agree at exact-1 boundaries.
constexpr double kFullFileTol = 1e-9;

void require_feasible(const ProblemInstance& instance, const UncodedPlacement& x) {
    if (x.file_count() != instance.file_count() || x.helper_count() != instance.helper_count()) {
        throw std::invalid_argument("placement dimensions do not match instance");
    }
    if (!x.feasible(instance.cache_size())) {
        throw std::invalid_argument("placement violates cache size constraint");
    }
}

void require_feasible(const ProblemInstance& instance, const CodedPlacement& rho) {
    if (rho.file_count() != instance.file_count() || rho.helper_count() != instance.helper_count()) {
        throw std::invalid_argument("placement dimensions do not match instance");
    }
    if (!rho.feasible(instance.cache_size())) {
        throw std::invalid_argument("coded placement violates cache size or box constraint");
    }
}

double user_delay_unchecked(const ProblemInstance& instance, const UncodedPlacement& x, int u) {
    const auto& order = instance.order(u);
    const auto& probs = instance.popularity().probs;
    double total = 0.0;
    for (int f = 0; f < instance.file_count(); ++f) {
        double delay = order.delay.back();  // base station fallback
        for (int j = 0; j + 1 < order.size(); ++j) {
            if (x.at(f, order.helper[j])) {
                delay = order.delay[j];
                break;
            }
        }
        total += probs[f] * delay;
    }
    return total;
}

double coded_uf_delay_unchecked(const ProblemInstance& instance, const CodedPlacement& rho,
                                int u, int f) {
    const auto& order = instance.order(u);
    double best = 0.0;
    for (int j = 0; j < order.size(); ++j) {
        double wj = order.delay[j];
        double d = wj;
        for (int i = 0; i < j; ++i) {
            d -= rho.at(f, order.helper[i]) * (wj - order.delay[i]);
        }
        best = std::max(best, d);
    }
    return best;
}

double coded_user_delay_unchecked(const ProblemInstance& instance, const CodedPlacement& rho, int u) {
    const auto& probs = instance.popularity().probs;
    double total = 0.0;
    for (int f = 0; f < instance.file_count(); ++f) {
        total += probs[f] * coded_uf_delay_unchecked(instance, rho, u, f);
    }
    return total;
}

}  // namespace

double uncoded_user_delay(const ProblemInstance& instance, const UncodedPlacement& x, int u) {
    require_feasible(instance, x);
    return user_delay_unchecked(instance, x, u);
}

double uncoded_objective(const ProblemInstance& instance, const UncodedPlacement& x) {
    require_feasible(instance, x);
    // Summed directly in savings form: every term is nonnegative, so the
    // objective is exactly zero on an empty placement instead of picking up
    // popularity-sum roundoff.
    const auto& probs = instance.popularity().probs;
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        const auto& order = instance.order(u);
        const double w0 = order.delay.back();
        for (int f = 0; f < instance.file_count(); ++f) {
            for (int j = 0; j + 1 < order.size(); ++j) {
                if (x.at(f, order.helper[j])) {
                    total += probs[f] * (w0 - order.delay[j]);
                    break;
                }
            }
        }
    }
    return total;
}

bool is_special_case(const ProblemInstance& instance) {
    const auto& graph = instance.graph();
    const auto& delays = instance.delays();
    double omega1 = 0.0;
    bool seen = false;
    for (int u = 0; u < instance.user_count(); ++u) {
        for (int h : graph.helpers_of(u)) {
            double w = delays.at(h, u);
            if (!seen) {
                omega1 = w;
                seen = true;
            } else if (w != omega1) {
                return false;
            }
        }
    }
    if (seen) {
        for (int u = 0; u < instance.user_count(); ++u) {
            if (!(delays.bs_delay(u) > omega1)) return false;
        }
    }
    return true;
}

SpecialCaseInstance make_special_case(const ProblemInstance& instance) {
    if (!is_special_case(instance)) {
        throw std::invalid_argument(
            "instance is not a uniform-helper-delay special case: all non-BS edges must share "
            "one delay strictly below every BS delay");
    }
    SpecialCaseInstance sc;
    sc.instance = &instance;
    const auto& graph = instance.graph();
    sc.omega1 = 0.0;
    for (int u = 0; u < instance.user_count() && graph.edge_count() > 0; ++u) {
        if (!graph.helpers_of(u).empty()) {
            sc.omega1 = instance.delays().at(graph.helpers_of(u).front(), u);
            break;
        }
    }
    sc.wtilde.resize(instance.user_count());
    for (int u = 0; u < instance.user_count(); ++u) {
        sc.wtilde[u] = instance.delays().bs_delay(u) - sc.omega1;
    }
    return sc;
}

double special_case_value(const SpecialCaseInstance& sc, const UncodedPlacement& x) {
    const auto& instance = sc.base();
    require_feasible(instance, x);
    const auto& probs = instance.popularity().probs;
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        double covered = 0.0;
        for (int f = 0; f < instance.file_count(); ++f) {
            for (int h : instance.graph().helpers_of(u)) {
                if (x.at(f, h)) {
                    covered += probs[f];
                    break;
                }
            }
        }
        total += sc.wtilde[u] * covered;
    }
    return total;
}

double special_case_g(const SpecialCaseInstance& sc, const CodedPlacement& rho) {
    const auto& instance = sc.base();
    if (rho.file_count() != instance.file_count() || rho.helper_count() != instance.helper_count()) {
        throw std::invalid_argument("placement dimensions do not match instance");
    }
    for (int f = 0; f < rho.file_count(); ++f) {
        for (int h = 1; h <= rho.helper_count(); ++h) {
            double v = rho.at(f, h);
            if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
                throw std::invalid_argument("special_case_g: entry outside [0,1]");
            }
        }
    }
    const auto& probs = instance.popularity().probs;
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        const auto& neighbors = instance.graph().helpers_of(u);
        double user_value = 0.0;
        for (int f = 0; f < instance.file_count(); ++f) {
            double miss = 1.0;
            for (int h : neighbors) miss *= 1.0 - rho.at(f, h);
            user_value += probs[f] * (1.0 - miss);
        }
        total += sc.wtilde[u] * user_value;
    }
    return total;
}

double coverage_surrogate(const SpecialCaseInstance& sc, const CodedPlacement& rho) {
    const auto& instance = sc.base();
    require_feasible(instance, rho);
    const auto& probs = instance.popularity().probs;
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        const auto& neighbors = instance.graph().helpers_of(u);
        double user_value = 0.0;
        for (int f = 0; f < instance.file_count(); ++f) {
            double mass = 0.0;
            for (int h : neighbors) mass += rho.at(f, h);
            user_value += probs[f] * std::min(1.0, mass);
        }
        total += sc.wtilde[u] * user_value;
    }
    return total;
}

double coded_user_file_delay(const ProblemInstance& instance, const CodedPlacement& rho,
                             int u, int f) {
    require_feasible(instance, rho);
    return coded_uf_delay_unchecked(instance, rho, u, f);
}

double coded_user_file_delay_piecewise(const ProblemInstance& instance, const CodedPlacement& rho,
                                       int u, int f) {
    require_feasible(instance, rho);
    const auto& order = instance.order(u);
    double cumulative = 0.0;
    for (int j = 0; j < order.size(); ++j) {
        double frac = order.helper[j] == kBaseStation ? 1.0 : rho.at(f, order.helper[j]);
        if (cumulative + frac >= 1.0 - kFullFileTol) {
            // Stop here: earlier helpers contribute their fractions, this one
            // serves the remainder.
            double wj = order.delay[j];
            double d = wj;
            for (int i = 0; i < j; ++i) {
                d -= rho.at(f, order.helper[i]) * (wj - order.delay[i]);
            }
            return d;
        }
        cumulative += frac;
    }
    return order.delay.back();  // unreachable: the BS fraction always completes
}

double coded_user_delay(const ProblemInstance& instance, const CodedPlacement& rho, int u) {
    require_feasible(instance, rho);
    return coded_user_delay_unchecked(instance, rho, u);
}

double coded_objective(const ProblemInstance& instance, const CodedPlacement& rho) {
    require_feasible(instance, rho);
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        total += coded_user_delay_unchecked(instance, rho, u);
    }
    return total;
}

double bs_only_total_delay(const ProblemInstance& instance) {
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        total += instance.delays().bs_delay(u);
    }
    return total;
}

}  // namespace hcache
