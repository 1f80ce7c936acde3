#include "caustica/expansions.hpp"

#include <algorithm>
#include <mutex>
#include <string>

namespace caustica {

int MultiIndex::order() const {
    int n = 0;
    for (const auto& [l, a] : entries) n += a;
    return n;
}

int MultiIndex::weight() const {
    int w = 0;
    for (const auto& [l, a] : entries) w += l * a;
    return w;
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (const auto& [l, a] : entries)
        for (int i = 2; i <= a; ++i) f *= i;
    return f;
}

namespace {

// descending partitions of `weight` into exactly `order` parts
void gen_partitions(int weight, int order, int max_part, std::vector<int>& parts,
                    std::vector<MultiIndex>& out) {
    if (order == 0) {
        if (weight != 0) return;
        MultiIndex mi;
        for (int p : parts) ++mi.entries[p];
        out.push_back(std::move(mi));
        return;
    }
    // each remaining part is >= 1 and <= max_part
    int hi = std::min(max_part, weight - (order - 1));
    for (int p = hi; p >= (weight + order - 1) / order; --p) {
        parts.push_back(p);
        gen_partitions(weight - p, order - 1, p, parts, out);
        parts.pop_back();
    }
}

} // namespace

std::vector<MultiIndex> enumerate_multi_indices(int order, int weight) {
    if (order < 0 || weight < 0)
        throw std::invalid_argument("multi-index enumeration needs order, weight >= 0");
    static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({order, weight});
    if (it != cache.end()) return it->second;
    std::vector<MultiIndex> out;
    if (order <= weight) {
        std::vector<int> parts;
        gen_partitions(weight, order, weight, parts, out);
    } else if (order == 0 && weight == 0) {
        out.push_back(MultiIndex{});
    }
    cache[{order, weight}] = out;
    return out;
}

std::pair<std::vector<TrigPoly>, std::vector<TrigPoly>>
sincos_series(const RotationNumber& rot, const std::vector<TrigPoly>& thetas) {
    const int K = static_cast<int>(thetas.size()) - 1;
    std::vector<TrigPoly> S(K + 1), C(K + 1);
    S[0] = TrigPoly(rot.s());
    C[0] = TrigPoly(rot.c());
    for (int k = 1; k <= K; ++k) {
        TrigPoly s_acc, c_acc;
        for (int l = 1; l < k; ++l) {
            s_acc += thetas[l] * C[k - l] * static_cast<double>(l);
            c_acc += thetas[l] * S[k - l] * static_cast<double>(l);
        }
        S[k] = thetas[k] * rot.c() + s_acc * (1.0 / k);
        C[k] = -(thetas[k] * rot.s()) - c_acc * (1.0 / k);
    }
    return {std::move(S), std::move(C)};
}

TrigPoly compose_coeffs(const std::vector<TrigPoly>& f_orders,
                        const std::vector<TrigPoly>& psi_orders, int k) {
    if (k < 1) throw std::invalid_argument("compose_coeffs needs k >= 1");
    TrigPoly out = k < static_cast<int>(f_orders.size()) ? f_orders[k] : TrigPoly{};
    for (int i = 1; i <= k - 1; ++i) {
        if (i >= static_cast<int>(f_orders.size())) break;
        TrigPoly f_ij = f_orders[i];
        for (int j = 1; j <= k - i; ++j) {
            f_ij = f_ij.derivative();
            TrigPoly weight_sum;
            for (const MultiIndex& alpha : enumerate_multi_indices(j, k - i)) {
                TrigPoly term(1.0 / alpha.factorial());
                for (const auto& [l, a] : alpha.entries) {
                    if (l >= static_cast<int>(psi_orders.size()))
                        throw std::invalid_argument("compose_coeffs: missing psi order " +
                                                    std::to_string(l));
                    for (int rep = 0; rep < a; ++rep) term = term * psi_orders[l];
                }
                weight_sum += term;
            }
            out += weight_sum * f_ij;
        }
    }
    return out;
}

ExpansionState::ExpansionState(RotationNumber rot, std::vector<TrigPoly> h_orders)
    : rot_(rot), h_(std::move(h_orders)) {
    if (h_.empty()) h_.resize(1);
    h_[0] = TrigPoly{};
    dh_.resize(h_.size());
    for (std::size_t k = 1; k < h_.size(); ++k) dh_[k] = h_[k].derivative();
    theta_.push_back(TrigPoly(0.5 * rot_.omega()));
    phi_.push_back(TrigPoly{});
    psi_.push_back(TrigPoly{});
    S_.push_back(TrigPoly(rot_.s()));
    C_.push_back(TrigPoly(rot_.c()));
    Hh_.push_back(TrigPoly(1.0));
    Hdh_.push_back(TrigPoly{});
    Q_.push_back(TrigPoly{});
    Rt_.push_back(TrigPoly{});
    zeta_.push_back(TrigPoly{});
}

const TrigPoly& ExpansionState::h_deriv(int i, int j) const {
    if (i < 1 || i > max_order()) throw std::out_of_range("h_deriv: bad order");
    if (j == 0) return h_[i];
    if (j == 1) return dh_[i];
    auto key = std::make_pair(i, j);
    auto it = deriv_cache_.find(key);
    if (it != deriv_cache_.end()) return it->second;
    TrigPoly d = h_deriv(i, j - 1).derivative();
    return deriv_cache_.emplace(key, std::move(d)).first->second;
}

const TrigPoly& ExpansionState::psi_power_sum(int j, int w) {
    if (j == 0 && w == 0) {
        static const TrigPoly one(1.0);
        return one;
    }
    auto key = std::make_pair(j, w);
    auto it = power_sum_cache_.find(key);
    if (it != power_sum_cache_.end()) return it->second;
    TrigPoly acc;
    if (j >= 1 && w >= j) {
        for (int l = 1; l <= w - j + 1; ++l) {
            if (l > completed_) throw InternalError("psi_power_sum needs committed psi orders");
            if (j == 1) {
                if (l == w) acc += psi_[l];
            } else {
                acc += psi_[l] * psi_power_sum(j - 1, w - l);
            }
        }
        acc = acc * (1.0 / j);
    }
    return power_sum_cache_.emplace(key, std::move(acc)).first->second;
}

const ExpansionState::PendingOrder& ExpansionState::prepare_order(int k) {
    if (pending_ && pending_->k == k) return *pending_;
    if (k != completed_ + 1)
        throw std::invalid_argument("prepare_order: order " + std::to_string(k) +
                                    " is not the next uncommitted order");
    if (k > max_order())
        throw std::invalid_argument("prepare_order: no deformation data beyond order " +
                                    std::to_string(max_order()));
    PendingOrder P;
    P.k = k;

    // composition coefficients H_k, H'_k
    TrigPoly Hk = h_[k];
    TrigPoly Hpk = dh_[k];
    for (int i = 1; i <= k - 1; ++i) {
        for (int j = 1; j <= k - i; ++j) {
            const TrigPoly& B = psi_power_sum(j, k - i);
            if (B.empty()) continue;
            Hk += B * h_deriv(i, j);
            Hpk += B * h_deriv(i, j + 1);
        }
    }
    P.support_k = Hk;
    P.support_deriv_k = Hpk;

    // theta_k-free tails of the sin/cos coefficients
    TrigPoly s_acc, c_acc;
    for (int l = 1; l < k; ++l) {
        s_acc += theta_[l] * C_[k - l] * static_cast<double>(l);
        c_acc += theta_[l] * S_[k - l] * static_cast<double>(l);
    }
    P.sin_tail = s_acc * (1.0 / k);
    P.cos_tail = -(c_acc * (1.0 / k));

    // difference-equation blocks
    TrigPoly Q = Hpk * rot_.s();
    TrigPoly Rt = Hk * rot_.c() + P.cos_tail;
    for (int l = 1; l < k; ++l) {
        Q += Hdh_[l] * S_[k - l];
        Rt += Hh_[l] * C_[k - l];
    }
    P.Q = Q;
    P.Rt = Rt;

    pending_ = std::move(P);
    return *pending_;
}

void ExpansionState::commit_order(int k, TrigPoly theta_k, TrigPoly phi_k, TrigPoly psi_k,
                                  TrigPoly zeta_k) {
    const PendingOrder& P = prepare_order(k);
    S_.push_back(theta_k * rot_.c() + P.sin_tail);
    C_.push_back(-(theta_k * rot_.s()) + P.cos_tail);
    Hh_.push_back(P.support_k);
    Hdh_.push_back(P.support_deriv_k);
    Q_.push_back(P.Q);
    Rt_.push_back(P.Rt);
    zeta_.push_back(std::move(zeta_k));
    theta_.push_back(std::move(theta_k));
    phi_.push_back(std::move(phi_k));
    psi_.push_back(std::move(psi_k));
    completed_ = k;
    pending_.reset();
}

void ExpansionState::replace_h(int k, TrigPoly new_h) {
    if (k <= completed_)
        throw std::invalid_argument("replace_h: order " + std::to_string(k) +
                                    " is already committed");
    if (k > max_order()) throw std::out_of_range("replace_h: order beyond stored data");
    dh_[k] = new_h.derivative();
    h_[k] = std::move(new_h);
    for (auto it = deriv_cache_.begin(); it != deriv_cache_.end();)
        it = (it->first.first == k) ? deriv_cache_.erase(it) : std::next(it);
    pending_.reset();
}

std::pair<TrigPoly, TrigPoly> sincos_coeffs(const ExpansionState& st, int k) {
    if (k < 0 || k > st.completed_order())
        throw std::invalid_argument("sincos_coeffs: theta orders up to k must be available");
    return {st.sin_coeff(k), st.cos_coeff(k)};
}

std::pair<TrigPoly, TrigPoly> qr_coeffs(ExpansionState& st, int k) {
    if (k <= st.completed_order()) return {st.q_coeff(k), st.rt_coeff(k)};
    const auto& P = st.prepare_order(k);
    return {P.Q, P.Rt};
}

} // namespace caustica
