#ifndef SETCOH_MODEL_HPP
#define SETCOH_MODEL_HPP

// Set scorer. Each statement is pooled into a vector, every unordered pair
// of statements goes through a small network, and the mean and max of the
// pair features feed an energy head and a two-way class head.
//
//   x_i = e[CLS] + mean_t e[t]            u_i = tanh(Ws x_i + bs)
//   z   = [u_i + u_j ; u_i * u_j]         r   = relu(P2 tanh(P1 z + c1) + c2)
//   g   = [mean_{i<j} r ; max_{i<j} r]    t   = tanh(Wh g + bh)
//   energy = we . t + be                  logits = Wc t + bc

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "setcoh/error.hpp"
#include "setcoh/rng.hpp"
#include "setcoh/tokenizer.hpp"

namespace setcoh {

struct ModelDims {
    std::size_t vocab = 2;
    std::size_t d = 32;  // embedding width
    std::size_t h = 32;  // statement and pair width
    std::size_t k = 32;  // head width
};

class Model {
public:
    // Parameter blocks in file order.
    enum Block { Emb, Ws, Bs, P1, C1, P2, C2, Wh, Bh, We, Be, Wc, Bc, kBlocks };

    Model() = default;

    /// Zero parameters.
    Model(ModelDims dims, Vocabulary vocab, std::uint64_t init_seed = 0)
        : dims_(dims), vocab_(std::move(vocab)), init_seed_(init_seed) {
        dims_.vocab = vocab_.size();
        layout();
        theta_.assign(size_, 0.0);
    }

    /// Random initialization: N(0,1) embeddings, U(+-1/sqrt(fan_in)) layers,
    /// zero pair-output bias.
    static Model init(ModelDims dims, Vocabulary vocab, std::uint64_t seed) {
        Model m(dims, std::move(vocab), seed);
        Rng rng(seed);
        for (std::size_t b = 0; b < kBlocks; ++b) {
            auto blk = m.block(static_cast<Block>(b));
            if (b == Emb) {
                for (auto& w : blk) w = rng.normal();
                continue;
            }
            double bound = 1.0 / std::sqrt(static_cast<double>(m.fan_in(static_cast<Block>(b))));
            for (auto& w : blk) w = rng.uniform(-bound, bound);
        }
        for (auto& w : m.block(C2)) w = 0.0;
        return m;
    }

    const ModelDims& dims() const { return dims_; }
    const Vocabulary& vocab() const { return vocab_; }
    std::uint64_t init_seed() const { return init_seed_; }
    std::size_t num_params() const { return size_; }

    std::span<double> params() { return theta_; }
    std::span<const double> params() const { return theta_; }

    std::span<double> block(Block b) { return std::span<double>(theta_).subspan(off_[b], len_[b]); }
    std::span<const double> block(Block b) const { return std::span<const double>(theta_).subspan(off_[b], len_[b]); }
    std::size_t block_offset(Block b) const { return off_[b]; }

    // ---- forward -----------------------------------------------------------

    struct Cache {
        std::size_t n = 0;
        std::vector<double> x, u;         // n x d, n x h
        std::vector<double> q, c2;        // pairs x h
        std::vector<std::uint32_t> pi, pj;
        std::vector<double> g, t;         // 2h (mean, max), k
        std::vector<std::uint32_t> arg;   // argmax pair per feature
        double energy = 0.0;
        std::array<double, 2> logits{};
    };

    void forward(const TokenizedSet& ts, Cache& c) const {
        const std::size_t d = dims_.d, h = dims_.h, k = dims_.k;
        const std::size_t n = ts.statements();
        c.n = n;
        c.x.assign(n * d, 0.0);
        c.u.assign(n * h, 0.0);
        const double* E = &theta_[off_[Emb]];
        for (std::size_t i = 0; i < n; ++i) {
            double* xi = &c.x[i * d];
            const std::size_t b = ts.offsets[i], e = ts.offsets[i + 1];
            for (std::size_t tpos = b; tpos < e; ++tpos) {
                const double* row = E + static_cast<std::size_t>(ts.tokens[tpos]) * d;
                for (std::size_t a = 0; a < d; ++a) xi[a] += row[a];
            }
            const double inv = e > b ? 1.0 / static_cast<double>(e - b) : 0.0;
            for (std::size_t a = 0; a < d; ++a) xi[a] = xi[a] * inv + E[kCls * d + a];
            affine(Ws, Bs, xi, h, d, &c.u[i * h]);
            for (std::size_t a = 0; a < h; ++a) c.u[i * h + a] = std::tanh(c.u[i * h + a]);
        }

        // P1 z = P1a (u_i + u_j) + P1b (u_i * u_j); the first term is shared.
        std::vector<double> A(n * h, 0.0);
        const double* P1w = &theta_[off_[P1]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t r = 0; r < h; ++r) {
                const double* row = P1w + r * 2 * h;
                double s = 0.0;
                for (std::size_t a = 0; a < h; ++a) s += row[a] * c.u[i * h + a];
                A[i * h + r] = s;
            }
        const std::size_t np = n < 2 ? 0 : n * (n - 1) / 2;
        c.q.assign(np * h, 0.0);
        c.c2.assign(np * h, 0.0);
        c.pi.resize(np);
        c.pj.resize(np);
        c.g.assign(2 * h, 0.0);
        c.arg.assign(h, 0);
        std::vector<double> prod(h);
        const double* c1 = &theta_[off_[C1]];
        std::size_t p = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, ++p) {
                c.pi[p] = static_cast<std::uint32_t>(i);
                c.pj[p] = static_cast<std::uint32_t>(j);
                for (std::size_t a = 0; a < h; ++a) prod[a] = c.u[i * h + a] * c.u[j * h + a];
                double* q = &c.q[p * h];
                for (std::size_t r = 0; r < h; ++r) {
                    const double* row = P1w + r * 2 * h + h;
                    double s = A[i * h + r] + A[j * h + r] + c1[r];
                    for (std::size_t a = 0; a < h; ++a) s += row[a] * prod[a];
                    q[r] = std::tanh(s);
                }
                double* c2 = &c.c2[p * h];
                affine(P2, C2, q, h, h, c2);
                for (std::size_t r = 0; r < h; ++r) {
                    const double v = relu(c2[r]);
                    c.g[r] += v;
                    if (p == 0 || v > c.g[h + r]) {  // ties keep the first pair
                        c.g[h + r] = v;
                        c.arg[r] = static_cast<std::uint32_t>(p);
                    }
                }
            }
        for (std::size_t r = 0; r < h; ++r) c.g[r] = np ? c.g[r] / static_cast<double>(np) : 0.0;

        c.t.assign(k, 0.0);
        affine(Wh, Bh, c.g.data(), k, 2 * h, c.t.data());
        for (auto& v : c.t) v = std::tanh(v);
        const double* we = &theta_[off_[We]];
        double en = theta_[off_[Be]];
        for (std::size_t a = 0; a < k; ++a) en += we[a] * c.t[a];
        c.energy = en;
        const double* Wcw = &theta_[off_[Wc]];
        for (std::size_t cls = 0; cls < 2; ++cls) {
            double s = theta_[off_[Bc] + cls];
            for (std::size_t a = 0; a < k; ++a) s += Wcw[cls * k + a] * c.t[a];
            c.logits[cls] = s;
        }
    }

    double energy(const TokenizedSet& ts) const {
        Cache c;
        forward(ts, c);
        return c.energy;
    }
    std::array<double, 2> logits(const TokenizedSet& ts) const {
        Cache c;
        forward(ts, c);
        return c.logits;
    }

    // ---- backward ----------------------------------------------------------

    /// grad += dE_coef * dEnergy/dtheta + sum_c dlogit[c] * dLogit_c/dtheta.
    void backward(const TokenizedSet& ts, const Cache& c, double dE_coef, std::array<double, 2> dlogit,
                  std::span<double> grad) const {
        const std::size_t d = dims_.d, h = dims_.h, k = dims_.k, n = c.n;
        double* G = grad.data();

        // heads
        std::vector<double> dt(k, 0.0);
        const double* we = &theta_[off_[We]];
        const double* Wcw = &theta_[off_[Wc]];
        if (dE_coef != 0.0) {
            G[off_[Be]] += dE_coef;
            for (std::size_t a = 0; a < k; ++a) {
                G[off_[We] + a] += dE_coef * c.t[a];
                dt[a] += dE_coef * we[a];
            }
        }
        for (std::size_t cls = 0; cls < 2; ++cls) {
            if (dlogit[cls] == 0.0) continue;
            G[off_[Bc] + cls] += dlogit[cls];
            for (std::size_t a = 0; a < k; ++a) {
                G[off_[Wc] + cls * k + a] += dlogit[cls] * c.t[a];
                dt[a] += dlogit[cls] * Wcw[cls * k + a];
            }
        }
        std::vector<double> dah(k);
        for (std::size_t a = 0; a < k; ++a) dah[a] = dt[a] * (1.0 - c.t[a] * c.t[a]);
        std::vector<double> dg(2 * h, 0.0);
        affine_backward(Wh, Bh, dah.data(), c.g.data(), k, 2 * h, dg.data(), G);
        if (n < 2) return;

        // pairs
        const std::size_t np = c.pi.size();
        std::vector<double> dR(h);
        for (std::size_t a = 0; a < h; ++a) dR[a] = dg[a] / static_cast<double>(np);
        std::vector<double> du(n * h, 0.0), dc2(h), dq(h), da1(h), dprod(h, 0.0), dsum_acc(n * h, 0.0);
        const double* P1w = &theta_[off_[P1]];
        double* GP1 = G + off_[P1];
        for (std::size_t p = 0; p < np; ++p) {
            const std::size_t i = c.pi[p], j = c.pj[p];
            const double* q = &c.q[p * h];
            const double* c2 = &c.c2[p * h];
            for (std::size_t r = 0; r < h; ++r)
                dc2[r] = c2[r] > 0.0 ? dR[r] + (c.arg[r] == p ? dg[h + r] : 0.0) : 0.0;
            std::fill(dq.begin(), dq.end(), 0.0);
            affine_backward(P2, C2, dc2.data(), q, h, h, dq.data(), G);
            for (std::size_t r = 0; r < h; ++r) da1[r] = dq[r] * (1.0 - q[r] * q[r]);
            // P1b acts on u_i * u_j; P1a's contribution is gathered per statement below.
            std::fill(dprod.begin(), dprod.end(), 0.0);
            for (std::size_t r = 0; r < h; ++r) {
                const double g1 = da1[r];
                G[off_[C1] + r] += g1;
                const double* row = P1w + r * 2 * h + h;
                double* grow = GP1 + r * 2 * h + h;
                for (std::size_t a = 0; a < h; ++a) {
                    grow[a] += g1 * c.u[i * h + a] * c.u[j * h + a];
                    dprod[a] += g1 * row[a];
                }
            }
            for (std::size_t a = 0; a < h; ++a) {
                du[i * h + a] += dprod[a] * c.u[j * h + a];
                du[j * h + a] += dprod[a] * c.u[i * h + a];
            }
            for (std::size_t r = 0; r < h; ++r) {
                dsum_acc[i * h + r] += da1[r];
                dsum_acc[j * h + r] += da1[r];
            }
        }
        // P1a: sum over pairs of da1 (u_i + u_j)^T = sum over statements of dsum_acc_i u_i^T.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t r = 0; r < h; ++r) {
                const double g1 = dsum_acc[i * h + r];
                if (g1 == 0.0) continue;
                const double* row = P1w + r * 2 * h;
                double* grow = GP1 + r * 2 * h;
                for (std::size_t a = 0; a < h; ++a) {
                    grow[a] += g1 * c.u[i * h + a];
                    du[i * h + a] += g1 * row[a];
                }
            }

        // statements
        std::vector<double> das(h), dx(d);
        double* GE = G + off_[Emb];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < h; ++a) das[a] = du[i * h + a] * (1.0 - c.u[i * h + a] * c.u[i * h + a]);
            std::fill(dx.begin(), dx.end(), 0.0);
            affine_backward(Ws, Bs, das.data(), &c.x[i * d], h, d, dx.data(), G);
            for (std::size_t a = 0; a < d; ++a) GE[kCls * d + a] += dx[a];
            const std::size_t b = ts.offsets[i], e = ts.offsets[i + 1];
            if (e == b) continue;
            const double inv = 1.0 / static_cast<double>(e - b);
            for (std::size_t tpos = b; tpos < e; ++tpos) {
                double* row = GE + static_cast<std::size_t>(ts.tokens[tpos]) * d;
                for (std::size_t a = 0; a < d; ++a) row[a] += dx[a] * inv;
            }
        }
    }

    std::vector<double> grad_energy(const TokenizedSet& ts) const {
        Cache c;
        forward(ts, c);
        std::vector<double> g(size_, 0.0);
        backward(ts, c, 1.0, {0.0, 0.0}, g);
        return g;
    }

    /// Gradients of the consistent and inconsistent logits.
    std::array<std::vector<double>, 2> grad_logits(const TokenizedSet& ts) const {
        Cache c;
        forward(ts, c);
        std::array<std::vector<double>, 2> g{std::vector<double>(size_, 0.0), std::vector<double>(size_, 0.0)};
        backward(ts, c, 0.0, {1.0, 0.0}, g[0]);
        backward(ts, c, 0.0, {0.0, 1.0}, g[1]);
        return g;
    }

    // ---- persistence -------------------------------------------------------

    static constexpr char kMagic[8] = {'S', 'E', 'T', 'C', 'O', 'H', 'M', '\0'};
    static constexpr std::uint32_t kFormatVersion = 1;

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
        os.write(kMagic, 8);
        put_u32(os, kFormatVersion);
        for (auto v : {dims_.d, dims_.h, dims_.k, dims_.vocab}) put_u64(os, v);
        put_u64(os, init_seed_);
        put_u64(os, vocab_.hash());
        for (const auto& t : vocab_.tokens()) {
            put_u32(os, static_cast<std::uint32_t>(t.size()));
            os.write(t.data(), static_cast<std::streamsize>(t.size()));
        }
        put_u64(os, size_);
        for (double w : theta_) put_u64(os, std::bit_cast<std::uint64_t>(w));
        if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
    }

    static Model load(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
        char magic[8];
        read_exact(is, magic, 8);
        if (std::memcmp(magic, kMagic, 8) != 0) throw Error(ErrorKind::CorruptFile, path + " is not a model file");
        std::uint32_t version = get_u32(is);
        if (version != kFormatVersion)
            throw Error(ErrorKind::VersionMismatch, "format version " + std::to_string(version) + ", expected " +
                                                        std::to_string(kFormatVersion));
        ModelDims dims;
        dims.d = get_u64(is);
        dims.h = get_u64(is);
        dims.k = get_u64(is);
        dims.vocab = get_u64(is);
        std::uint64_t seed = get_u64(is);
        std::uint64_t vhash = get_u64(is);
        if (dims.vocab > (1u << 24) || dims.d > 4096 || dims.h > 4096 || dims.k > 4096)
            throw Error(ErrorKind::CorruptFile, "implausible dimensions in " + path);
        std::vector<std::string> toks(dims.vocab);
        for (auto& t : toks) {
            std::uint32_t len = get_u32(is);
            if (len > 4096) throw Error(ErrorKind::CorruptFile, "implausible token length");
            t.resize(len);
            read_exact(is, t.data(), len);
        }
        Vocabulary vocab = Vocabulary::from_tokens(std::move(toks));
        if (vocab.hash() != vhash) throw Error(ErrorKind::VersionMismatch, "vocabulary hash mismatch in " + path);
        Model m(dims, std::move(vocab), seed);
        if (get_u64(is) != m.size_) throw Error(ErrorKind::CorruptFile, "parameter count mismatch in " + path);
        for (auto& w : m.theta_) w = std::bit_cast<double>(get_u64(is));
        for (double w : m.theta_)
            if (!std::isfinite(w)) throw Error(ErrorKind::CorruptFile, "non-finite parameter in " + path);
        return m;
    }

private:
    static double relu(double x) { return x > 0.0 ? x : 0.0; }

    void layout() {
        const std::size_t V = dims_.vocab, d = dims_.d, h = dims_.h, k = dims_.k;
        const std::size_t lens[kBlocks] = {V * d, h * d, h, h * 2 * h, h, h * h, h, k * 2 * h, k, k, 1, 2 * k, 2};
        std::size_t o = 0;
        for (std::size_t b = 0; b < kBlocks; ++b) {
            off_[b] = o;
            len_[b] = lens[b];
            o += lens[b];
        }
        size_ = o;
    }

    std::size_t fan_in(Block b) const {
        switch (b) {
            case Ws: case Bs: return dims_.d;
            case P1: case C1: return 2 * dims_.h;
            case P2: case C2: return dims_.h;
            case Wh: case Bh: return 2 * dims_.h;
            default: return dims_.k;
        }
    }

    // out = W in + b, W is rows x cols.
    void affine(Block W, Block B, const double* in, std::size_t rows, std::size_t cols, double* out) const {
        const double* w = &theta_[off_[W]];
        const double* b = &theta_[off_[B]];
        for (std::size_t r = 0; r < rows; ++r) {
            double s = b[r];
            const double* row = w + r * cols;
            for (std::size_t a = 0; a < cols; ++a) s += row[a] * in[a];
            out[r] = s;
        }
    }
    // Accumulates dW, db into G and W^T dout into din.
    void affine_backward(Block W, Block B, const double* dout, const double* in, std::size_t rows, std::size_t cols,
                         double* din, double* G) const {
        const double* w = &theta_[off_[W]];
        double* gw = G + off_[W];
        double* gb = G + off_[B];
        for (std::size_t r = 0; r < rows; ++r) {
            const double g = dout[r];
            if (g == 0.0) continue;
            gb[r] += g;
            const double* row = w + r * cols;
            double* grow = gw + r * cols;
            for (std::size_t a = 0; a < cols; ++a) {
                grow[a] += g * in[a];
                din[a] += g * row[a];
            }
        }
    }

    static void put_u32(std::ostream& os, std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        os.write(b, 4);
    }
    static void put_u64(std::ostream& os, std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        os.write(b, 8);
    }
    static void read_exact(std::istream& is, char* buf, std::size_t n) {
        is.read(buf, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is.gcount()) != n) throw Error(ErrorKind::CorruptFile, "unexpected end of file");
    }
    static std::uint32_t get_u32(std::istream& is) {
        unsigned char b[4];
        read_exact(is, reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    static std::uint64_t get_u64(std::istream& is) {
        unsigned char b[8];
        read_exact(is, reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    ModelDims dims_;
    Vocabulary vocab_;
    std::uint64_t init_seed_ = 0;
    std::vector<double> theta_;
    std::size_t off_[kBlocks]{};
    std::size_t len_[kBlocks]{};
    std::size_t size_ = 0;
};

inline double energy(const Model& m, const TokenizedSet& t) { return m.energy(t); }
inline std::array<double, 2> binary_logits(const Model& m, const TokenizedSet& t) { return m.logits(t); }

/// Softmax probability of the inconsistent class.
inline double inconsistent_prob(const std::array<double, 2>& l) { return 1.0 / (1.0 + std::exp(l[0] - l[1])); }

}  // namespace setcoh

#endif  // SETCOH_MODEL_HPP
