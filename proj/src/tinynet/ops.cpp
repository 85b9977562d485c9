// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/tinynet/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "polsfp/error.hpp"

namespace polsfp::tinynet {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

struct ConvGeometry {
    int n, c, h, w;    // input
    int o, k;          // filters
    int stride, pad;
    int ho, wo;        // output

    int rows() const { return c * k * k; }
    int cols() const { return ho * wo; }
    bool direct() const { return k == 1 && stride == 1 && pad == 0; }
};

void im2col(const double* x, const ConvGeometry& g, double* cols) {
    const int p = g.cols();
    for (int ci = 0; ci < g.c; ++ci) {
        const double* xc = x + static_cast<std::size_t>(ci) * g.h * g.w;
        for (int ki = 0; ki < g.k; ++ki) {
            for (int kj = 0; kj < g.k; ++kj) {
                double* row = cols + static_cast<std::size_t>((ci * g.k + ki) * g.k + kj) * p;
                for (int oy = 0; oy < g.ho; ++oy) {
                    const int iy = oy * g.stride - g.pad + ki;
                    double* dst = row + static_cast<std::size_t>(oy) * g.wo;
                    if (iy < 0 || iy >= g.h) {
                        std::fill(dst, dst + g.wo, 0.0);
                        continue;
                    }
                    const double* src = xc + static_cast<std::size_t>(iy) * g.w;
                    for (int ox = 0; ox < g.wo; ++ox) {
                        const int ix = ox * g.stride - g.pad + kj;
                        dst[ox] = (ix >= 0 && ix < g.w) ? src[ix] : 0.0;
                    }
                }
            }
        }
    }
}

void col2im_add(const double* cols, const ConvGeometry& g, double* dx) {
    const int p = g.cols();
    for (int ci = 0; ci < g.c; ++ci) {
        double* xc = dx + static_cast<std::size_t>(ci) * g.h * g.w;
        for (int ki = 0; ki < g.k; ++ki) {
            for (int kj = 0; kj < g.k; ++kj) {
                const double* row = cols + static_cast<std::size_t>((ci * g.k + ki) * g.k + kj) * p;
                for (int oy = 0; oy < g.ho; ++oy) {
                    const int iy = oy * g.stride - g.pad + ki;
                    if (iy < 0 || iy >= g.h) continue;
                    const double* src = row + static_cast<std::size_t>(oy) * g.wo;
                    double* dst = xc + static_cast<std::size_t>(iy) * g.w;
                    for (int ox = 0; ox < g.wo; ++ox) {
                        const int ix = ox * g.stride - g.pad + kj;
                        if (ix >= 0 && ix < g.w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

void require_nchw(const Tensor& t, const char* name) {
    require(t.defined() && t.rank() == 4, std::string(name) + " must be a rank-4 NCHW tensor");
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride, int padding) {
    require_nchw(input, "conv2d input");
    require(weights.defined() && weights.rank() == 4, "conv2d weights must be (O, C, k, k)");
    require(stride >= 1 && padding >= 0, "conv2d stride must be >= 1 and padding >= 0");
    ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3), weights.dim(0), weights.dim(2),
                   stride, padding, 0, 0};
    require(weights.dim(1) == g.c, "conv2d weights expect " + std::to_string(weights.dim(1)) + " input channels, got " +
                                       std::to_string(g.c));
    require(weights.dim(2) == weights.dim(3), "conv2d kernel must be square");
    require(!bias.defined() || (bias.rank() == 1 && bias.dim(0) == g.o), "conv2d bias must have O entries");
    require(g.h + 2 * padding >= g.k && g.w + 2 * padding >= g.k, "conv2d kernel larger than padded input");
    g.ho = (g.h + 2 * padding - g.k) / stride + 1;
    g.wo = (g.w + 2 * padding - g.k) / stride + 1;

    const std::size_t in_stride = static_cast<std::size_t>(g.c) * g.h * g.w;
    const std::size_t out_stride = static_cast<std::size_t>(g.o) * g.cols();
    std::vector<double> out(static_cast<std::size_t>(g.n) * out_stride);
    std::vector<double> cols(g.direct() ? 0 : static_cast<std::size_t>(g.rows()) * g.cols());
    const CMapMat wm(weights.values().data(), g.o, g.rows());
    const auto x = input.values();

    for (int n = 0; n < g.n; ++n) {
        const double* xn = x.data() + n * in_stride;
        if (!g.direct()) im2col(xn, g, cols.data());
        const double* colp = g.direct() ? xn : cols.data();
        MapMat y(out.data() + n * out_stride, g.o, g.cols());
        y.noalias() = wm * CMapMat(colp, g.rows(), g.cols());
        if (bias.defined()) {
            const auto b = bias.values();
            for (int o = 0; o < g.o; ++o) y.row(o).array() += b[o];
        }
    }

    auto xn_node = input.node();
    auto wn_node = weights.node();
    auto bn_node = bias.defined() ? bias.node() : nullptr;
    return Tensor::make_result(
        {g.n, g.o, g.ho, g.wo}, std::move(out), {input, weights, bias},
        [g, xn_node, wn_node, bn_node, in_stride, out_stride](Node& self) {
            const CMapMat wm(wn_node->value.data(), g.o, g.rows());
            std::vector<double> cols(static_cast<std::size_t>(g.rows()) * g.cols());
            std::vector<double> dcols(g.direct() ? 0 : cols.size());
            const bool dx_on = xn_node->requires_grad;
            const bool dw_on = wn_node->requires_grad;
            const bool db_on = bn_node && bn_node->requires_grad;
            double* dx = dx_on ? xn_node->grad_buffer().data() : nullptr;
            double* dw = dw_on ? wn_node->grad_buffer().data() : nullptr;
            double* db = db_on ? bn_node->grad_buffer().data() : nullptr;
            for (int n = 0; n < g.n; ++n) {
                const CMapMat dy(self.grad.data() + n * out_stride, g.o, g.cols());
                const double* xn = xn_node->value.data() + n * in_stride;
                if (dw_on) {
                    const double* colp = xn;
                    if (!g.direct()) {
                        im2col(xn, g, cols.data());
                        colp = cols.data();
                    }
                    MapMat(dw, g.o, g.rows()).noalias() += dy * CMapMat(colp, g.rows(), g.cols()).transpose();
                }
                if (db_on)
                    for (int o = 0; o < g.o; ++o) db[o] += dy.row(o).sum();
                if (dx_on) {
                    if (g.direct()) {
                        MapMat(dx + n * in_stride, g.rows(), g.cols()).noalias() += wm.transpose() * dy;
                    } else {
                        MapMat(dcols.data(), g.rows(), g.cols()).noalias() = wm.transpose() * dy;
                        col2im_add(dcols.data(), g, dx + n * in_stride);
                    }
                }
            }
        });
}

Tensor upconv2x(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    require_nchw(input, "upconv2x input");
    require(weights.defined() && weights.rank() == 4 && weights.dim(2) == 2 && weights.dim(3) == 2,
            "upconv2x weights must be (C, O, 2, 2)");
    const int n_batch = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int o = weights.dim(1);
    require(weights.dim(0) == c, "upconv2x weights expect " + std::to_string(weights.dim(0)) +
                                     " input channels, got " + std::to_string(c));
    require(h >= 1 && w >= 1, "upconv2x input must be non-empty");
    require(!bias.defined() || (bias.rank() == 1 && bias.dim(0) == o), "upconv2x bias must have O entries");

    const int p = h * w;
    const std::size_t in_stride = static_cast<std::size_t>(c) * p;
    const std::size_t out_stride = static_cast<std::size_t>(o) * 4 * p;
    std::vector<double> out(static_cast<std::size_t>(n_batch) * out_stride);
    // weights viewed as (C, O*4); taps[(o, a, b), pixel] = W^T x.
    const CMapMat wm(weights.values().data(), c, o * 4);
    RowMat taps(o * 4, p);
    const auto x = input.values();

    for (int n = 0; n < n_batch; ++n) {
        taps.noalias() = wm.transpose() * CMapMat(x.data() + n * in_stride, c, p);
        double* yn = out.data() + n * out_stride;
        for (int oc = 0; oc < o; ++oc) {
            const double b = bias.defined() ? bias.values()[oc] : 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int bb = 0; bb < 2; ++bb) {
                    const double* t = taps.data() + static_cast<std::size_t>(oc * 4 + a * 2 + bb) * p;
                    for (int i = 0; i < h; ++i)
                        for (int j = 0; j < w; ++j)
                            yn[(static_cast<std::size_t>(oc) * 2 * h + 2 * i + a) * 2 * w + 2 * j + bb] =
                                t[i * w + j] + b;
                }
            }
        }
    }

    auto xn_node = input.node();
    auto wn_node = weights.node();
    auto bn_node = bias.defined() ? bias.node() : nullptr;
    return Tensor::make_result(
        {n_batch, o, 2 * h, 2 * w}, std::move(out), {input, weights, bias},
        [=](Node& self) {
            const CMapMat wm(wn_node->value.data(), c, o * 4);
            RowMat dtaps(o * 4, p);
            const bool dx_on = xn_node->requires_grad;
            const bool dw_on = wn_node->requires_grad;
            const bool db_on = bn_node && bn_node->requires_grad;
            for (int n = 0; n < n_batch; ++n) {
                const double* dy = self.grad.data() + n * out_stride;
                for (int oc = 0; oc < o; ++oc)
                    for (int a = 0; a < 2; ++a)
                        for (int bb = 0; bb < 2; ++bb) {
                            double* t = dtaps.data() + static_cast<std::size_t>(oc * 4 + a * 2 + bb) * p;
                            for (int i = 0; i < h; ++i)
                                for (int j = 0; j < w; ++j)
                                    t[i * w + j] = dy[(static_cast<std::size_t>(oc) * 2 * h + 2 * i + a) * 2 * w + 2 * j + bb];
                        }
                const CMapMat xn(xn_node->value.data() + n * in_stride, c, p);
                if (dw_on) MapMat(wn_node->grad_buffer().data(), c, o * 4).noalias() += xn * dtaps.transpose();
                if (dx_on) MapMat(xn_node->grad_buffer().data() + n * in_stride, c, p).noalias() += wm * dtaps;
                if (db_on) {
                    double* db = bn_node->grad_buffer().data();
                    for (int oc = 0; oc < o; ++oc) db[oc] += dtaps.middleRows(oc * 4, 4).sum();
                }
            }
        });
}

Tensor relu(const Tensor& x) {
    const auto v = x.values();
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
    auto xn = x.node();
    return Tensor::make_result(x.shape(), std::move(out), {x}, [xn](Node& self) {
        if (!xn->requires_grad) return;
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (xn->value[i] > 0.0) g[i] += self.grad[i];
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require(a.shape() == b.shape(), "add: shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()));
    const auto av = a.values(), bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
    auto an = a.node(), bn = b.node();
    return Tensor::make_result(a.shape(), std::move(out), {a, b}, [an, bn](Node& self) {
        for (auto* n : {an.get(), bn.get()}) {
            if (!n->requires_grad) continue;
            auto& g = n->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

Tensor scale(const Tensor& x, double factor) {
    const auto v = x.values();
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
    auto xn = x.node();
    return Tensor::make_result(x.shape(), std::move(out), {x}, [xn, factor](Node& self) {
        if (!xn->requires_grad) return;
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
    });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    require_nchw(a, "concat input");
    require_nchw(b, "concat input");
    require(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
            "concat_channels: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
    const std::size_t plane = static_cast<std::size_t>(a.dim(2)) * a.dim(3);
    const std::size_t sa = ca * plane, sb = cb * plane;
    std::vector<double> out(static_cast<std::size_t>(n) * (sa + sb));
    for (int i = 0; i < n; ++i) {
        std::copy_n(a.values().data() + i * sa, sa, out.data() + i * (sa + sb));
        std::copy_n(b.values().data() + i * sb, sb, out.data() + i * (sa + sb) + sa);
    }
    auto an = a.node(), bn = b.node();
    return Tensor::make_result({n, ca + cb, a.dim(2), a.dim(3)}, std::move(out), {a, b},
                               [an, bn, n, sa, sb](Node& self) {
                                   for (int i = 0; i < n; ++i) {
                                       const double* g = self.grad.data() + i * (sa + sb);
                                       if (an->requires_grad) {
                                           double* d = an->grad_buffer().data() + i * sa;
                                           for (std::size_t j = 0; j < sa; ++j) d[j] += g[j];
                                       }
                                       if (bn->requires_grad) {
                                           double* d = bn->grad_buffer().data() + i * sb;
                                           for (std::size_t j = 0; j < sb; ++j) d[j] += g[sa + j];
                                       }
                                   }
                               });
}

Tensor sum(const Tensor& x) {
    double s = 0.0;
    for (double v : x.values()) s += v;
    auto xn = x.node();
    return Tensor::make_result({1}, {s}, {x}, [xn](Node& self) {
        if (!xn->requires_grad) return;
        for (auto& g : xn->grad_buffer()) g += self.grad[0];
    });
}

Tensor sum_of_squares(const Tensor& x) {
    double s = 0.0;
    for (double v : x.values()) s += v * v;
    auto xn = x.node();
    return Tensor::make_result({1}, {s}, {x}, [xn](Node& self) {
        if (!xn->requires_grad) return;
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * xn->value[i] * self.grad[0];
    });
}

Tensor cosine_loss(const Tensor& pred, const Tensor& target, std::span<const std::uint8_t> mask, double eps) {
    require_nchw(pred, "cosine_loss prediction");
    require(pred.dim(1) == 3, "cosine_loss expects 3 channels");
    require(target.shape() == pred.shape(), "cosine_loss target shape " + shape_string(target.shape()) +
                                                " differs from prediction " + shape_string(pred.shape()));
    const int n = pred.dim(0);
    const std::size_t plane = static_cast<std::size_t>(pred.dim(2)) * pred.dim(3);
    require(mask.size() == static_cast<std::size_t>(n) * plane, "cosine_loss mask size mismatch");

    std::size_t count = 0;
    for (auto m : mask) count += m != 0;
    if (count == 0) throw Error(ErrorCode::EmptyMask, "cosine_loss mask selects no pixels");

    const auto p = pred.values(), t = target.values();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (std::size_t q = 0; q < plane; ++q) {
            if (!mask[i * plane + q]) continue;
            const std::size_t base = static_cast<std::size_t>(i) * 3 * plane + q;
            double pp = 0.0, pt = 0.0;
            for (int ch = 0; ch < 3; ++ch) {
                pp += p[base + ch * plane] * p[base + ch * plane];
                pt += p[base + ch * plane] * t[base + ch * plane];
            }
            total += 1.0 - pt / std::max(std::sqrt(pp), eps);
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    std::vector<std::uint8_t> m(mask.begin(), mask.end());
    auto pn = pred.node(), tn = target.node();
    return Tensor::make_result({1}, {total * inv}, {pred}, [pn, tn, m = std::move(m), n, plane, inv, eps](Node& self) {
        if (!pn->requires_grad) return;
        auto& g = pn->grad_buffer();
        const double up = self.grad[0] * inv;
        for (int i = 0; i < n; ++i) {
            for (std::size_t q = 0; q < plane; ++q) {
                if (!m[i * plane + q]) continue;
                const std::size_t base = static_cast<std::size_t>(i) * 3 * plane + q;
                double pp = 0.0, pt = 0.0;
                for (int ch = 0; ch < 3; ++ch) {
                    pp += pn->value[base + ch * plane] * pn->value[base + ch * plane];
                    pt += pn->value[base + ch * plane] * tn->value[base + ch * plane];
                }
                const double len = std::sqrt(pp);
                for (int ch = 0; ch < 3; ++ch) {
                    const std::size_t k = base + ch * plane;
                    double d;
                    if (len > eps)
                        d = -(tn->value[k] / len - pt * pn->value[k] / (len * len * len));
                    else
                        d = -tn->value[k] / eps;
                    g[k] += up * d;
                }
            }
        }
    });
}

}  // namespace polsfp::tinynet
