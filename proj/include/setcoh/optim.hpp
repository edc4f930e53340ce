#ifndef SETCOH_OPTIM_HPP
#define SETCOH_OPTIM_HPP

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "setcoh/error.hpp"

namespace setcoh {

enum class OptimizerKind { Sgd, Adam };

inline OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "sgd") return OptimizerKind::Sgd;
    if (s == "adam") return OptimizerKind::Adam;
    throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + std::string(s) + "'");
}
inline const char* to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Adam;
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Optimizer {
public:
    Optimizer(OptimizerConfig cfg, std::size_t n) : cfg_(cfg) {
        if (cfg.kind == OptimizerKind::Adam) {
            m_.assign(n, 0.0);
            v_.assign(n, 0.0);
        }
    }

    void step(std::span<double> theta, std::span<const double> grad) {
        if (cfg_.kind == OptimizerKind::Sgd) {
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg_.lr * grad[i];
            return;
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            const double mhat = m_[i] / bc1, vhat = v_[i] / bc2;
            theta[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }

private:
    OptimizerConfig cfg_;
    std::vector<double> m_, v_;
    long long t_ = 0;
};

}  // namespace setcoh

#endif  // SETCOH_OPTIM_HPP
