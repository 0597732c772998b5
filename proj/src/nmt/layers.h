#ifndef NORMLEX_SRC_NMT_LAYERS_H_
#define NORMLEX_SRC_NMT_LAYERS_H_

// Forward and backward passes of the building blocks of the translation
// model. Backward functions accumulate (+=) into parameter gradients.

#include <Eigen/Dense>
#include <vector>

#include "normlex/nmt/parameters.h"

namespace normlex {
namespace nmt {
namespace layers {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatIn = Eigen::Ref<const Mat>;
using VecIn = Eigen::Ref<const Vec>;
using MatOut = Eigen::Ref<Mat>;
using VecOut = Eigen::Ref<Vec>;

inline Vec sigmoid(const Vec &x) { return (1.0 + (-x.array()).exp()).inverse().matrix(); }
inline Mat sigmoid(const Mat &x) { return (1.0 + (-x.array()).exp()).inverse().matrix(); }

// Numerically stable softmax of a vector.
Vec softmax(const VecIn &x);

// ---- Multi-width convolution with ReLU, "same" padding ----

struct ConvCache {
  std::vector<Mat> patches;      // per group: (width*D) x L
  std::vector<Mat> activations;  // per group: count x L (post-ReLU)
};

// `x` is D x L. Returns F x L where F is the total filter count. Weight and
// bias ids index into `params`.
Mat conv_forward(const ParamBuffer &params, const std::vector<int> &weight_ids,
                 const std::vector<int> &bias_ids, const std::vector<int> &widths, const MatIn &x,
                 ConvCache *cache);

// Returns dX (D x L).
Mat conv_backward(const ParamBuffer &params, const std::vector<int> &weight_ids,
                  const std::vector<int> &bias_ids, const std::vector<int> &widths,
                  const ConvCache &cache, const MatIn &dy, ParamBuffer *grad);

// ---- Max pooling over successive windows ----

// `x` is F x L; output is F x ceil(L/k). argmax holds the source column of
// every pooled value (first maximum on ties).
Mat maxpool_forward(const MatIn &x, int k, Eigen::MatrixXi *argmax);
Mat maxpool_backward(const MatIn &dy, const Eigen::MatrixXi &argmax, Eigen::Index length);

// ---- Highway layer ----

struct HighwayCache {
  Mat input, gate, transform;
};

Mat highway_forward(const MatIn &gate_w, const VecIn &gate_b, const MatIn &transform_w,
                    const VecIn &transform_b, const MatIn &x, HighwayCache *cache);
Mat highway_backward(const MatIn &gate_w, const MatIn &transform_w, const HighwayCache &cache,
                     const MatIn &dy, MatOut dgate_w, VecOut dgate_b, MatOut dtransform_w,
                     VecOut dtransform_b);

// ---- GRU cell on a precomputed input projection ax = W x + b ----

struct GruStep {
  Vec h_prev, z, r, n, q, h;
};

void gru_forward(const MatIn &u, const VecIn &ax, const VecIn &h_prev, GruStep *step);

// Given dh, writes d(ax) and d(U h_prev) (for dU += dah * h_prev^T) and
// returns d(h_prev).
Vec gru_backward(const MatIn &u, const GruStep &step, const VecIn &dh, VecOut dax, VecOut dah);

// ---- Additive attention ----

struct AttentionStep {
  Vec query;    // decoder state
  Mat hidden;   // tanh(Wq s + K + b), A x M
  Vec weights;  // M
  Vec context;  // 2He
};

// `keys` = Wk * enc (A x M), `enc` is 2He x M.
void attention_forward(const MatIn &wq, const VecIn &bias, const VecIn &score, const MatIn &keys,
                       const MatIn &enc, const VecIn &query, AttentionStep *step);

// Accumulates into dwq, dbias, dscore, dkeys (A x M) and denc; returns dquery.
Vec attention_backward(const MatIn &wq, const VecIn &score, const MatIn &enc,
                       const AttentionStep &step, const VecIn &dcontext, MatOut dwq,
                       VecOut dbias, VecOut dscore, MatOut dkeys, MatOut denc);

}  // namespace layers
}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_SRC_NMT_LAYERS_H_
