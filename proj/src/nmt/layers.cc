#include "nmt/layers.h"

#include <algorithm>

namespace normlex {
namespace nmt {
namespace layers {

Vec softmax(const VecIn &x) {
  Vec e = (x.array() - x.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Mat conv_forward(const ParamBuffer &params, const std::vector<int> &weight_ids,
                 const std::vector<int> &bias_ids, const std::vector<int> &widths, const MatIn &x,
                 ConvCache *cache) {
  const Eigen::Index d = x.rows();
  const Eigen::Index len = x.cols();
  Eigen::Index total = 0;
  for (int id : weight_ids) total += params.table().at(id).rows;

  Mat out(total, len);
  cache->patches.resize(widths.size());
  cache->activations.resize(widths.size());
  Eigen::Index row = 0;
  for (std::size_t g = 0; g < widths.size(); ++g) {
    const int w = widths[g];
    const int left = (w - 1) / 2;
    Mat &patch = cache->patches[g];
    patch.setZero(w * d, len);
    for (Eigen::Index i = 0; i < len; ++i) {
      for (int j = 0; j < w; ++j) {
        const Eigen::Index p = i - left + j;
        if (p >= 0 && p < len) patch.block(j * d, i, d, 1) = x.col(p);
      }
    }
    auto weight = params.mat(weight_ids[g]);
    auto bias = params.vec(bias_ids[g]);
    Mat a = weight * patch;
    a.colwise() += bias;
    cache->activations[g] = a.cwiseMax(0.0);
    out.middleRows(row, a.rows()) = cache->activations[g];
    row += a.rows();
  }
  return out;
}

Mat conv_backward(const ParamBuffer &params, const std::vector<int> &weight_ids,
                  const std::vector<int> &bias_ids, const std::vector<int> &widths,
                  const ConvCache &cache, const MatIn &dy, ParamBuffer *grad) {
  const Eigen::Index len = dy.cols();
  const Eigen::Index d = cache.patches.empty() ? 0 : cache.patches[0].rows() / widths[0];
  Mat dx = Mat::Zero(d, len);
  Eigen::Index row = 0;
  for (std::size_t g = 0; g < widths.size(); ++g) {
    const int w = widths[g];
    const int left = (w - 1) / 2;
    const Mat &act = cache.activations[g];
    Mat da = dy.middleRows(row, act.rows()).cwiseProduct((act.array() > 0.0).cast<double>().matrix());
    row += act.rows();
    grad->mat(weight_ids[g]).noalias() += da * cache.patches[g].transpose();
    grad->vec(bias_ids[g]) += da.rowwise().sum();
    Mat dpatch = params.mat(weight_ids[g]).transpose() * da;
    for (Eigen::Index i = 0; i < len; ++i) {
      for (int j = 0; j < w; ++j) {
        const Eigen::Index p = i - left + j;
        if (p >= 0 && p < len) dx.col(p) += dpatch.block(j * d, i, d, 1);
      }
    }
  }
  return dx;
}

Mat maxpool_forward(const MatIn &x, int k, Eigen::MatrixXi *argmax) {
  const Eigen::Index len = x.cols();
  const Eigen::Index windows = (len + k - 1) / k;
  Mat out(x.rows(), windows);
  argmax->resize(x.rows(), windows);
  for (Eigen::Index m = 0; m < windows; ++m) {
    const Eigen::Index begin = m * k;
    const Eigen::Index end = std::min<Eigen::Index>(len, begin + k);
    for (Eigen::Index f = 0; f < x.rows(); ++f) {
      Eigen::Index best = begin;
      for (Eigen::Index p = begin + 1; p < end; ++p) {
        if (x(f, p) > x(f, best)) best = p;
      }
      out(f, m) = x(f, best);
      (*argmax)(f, m) = static_cast<int>(best);
    }
  }
  return out;
}

Mat maxpool_backward(const MatIn &dy, const Eigen::MatrixXi &argmax, Eigen::Index length) {
  Mat dx = Mat::Zero(dy.rows(), length);
  for (Eigen::Index m = 0; m < dy.cols(); ++m) {
    for (Eigen::Index f = 0; f < dy.rows(); ++f) dx(f, argmax(f, m)) += dy(f, m);
  }
  return dx;
}

Mat highway_forward(const MatIn &gate_w, const VecIn &gate_b, const MatIn &transform_w,
                    const VecIn &transform_b, const MatIn &x, HighwayCache *cache) {
  cache->input = x;
  Mat g = gate_w * x;
  g.colwise() += gate_b;
  cache->gate = sigmoid(g);
  Mat t = transform_w * x;
  t.colwise() += transform_b;
  cache->transform = t.cwiseMax(0.0);
  return (cache->gate.array() * cache->transform.array() +
          (1.0 - cache->gate.array()) * x.array())
      .matrix();
}

Mat highway_backward(const MatIn &gate_w, const MatIn &transform_w, const HighwayCache &cache,
                     const MatIn &dy, MatOut dgate_w, VecOut dgate_b, MatOut dtransform_w,
                     VecOut dtransform_b) {
  const auto &gate = cache.gate.array();
  Mat dgate_pre = (dy.array() * (cache.transform.array() - cache.input.array()) * gate *
                   (1.0 - gate))
                      .matrix();
  Mat dtransform_pre = (dy.array() * gate * (cache.transform.array() > 0.0).cast<double>()).matrix();
  dgate_w.noalias() += dgate_pre * cache.input.transpose();
  dgate_b += dgate_pre.rowwise().sum();
  dtransform_w.noalias() += dtransform_pre * cache.input.transpose();
  dtransform_b += dtransform_pre.rowwise().sum();
  Mat dx = (dy.array() * (1.0 - gate)).matrix();
  dx.noalias() += gate_w.transpose() * dgate_pre;
  dx.noalias() += transform_w.transpose() * dtransform_pre;
  return dx;
}

void gru_forward(const MatIn &u, const VecIn &ax, const VecIn &h_prev, GruStep *step) {
  const Eigen::Index h = h_prev.size();
  Vec ah = u * h_prev;
  step->h_prev = h_prev;
  step->z = sigmoid(Vec(ax.segment(0, h) + ah.segment(0, h)));
  step->r = sigmoid(Vec(ax.segment(h, h) + ah.segment(h, h)));
  step->q = ah.segment(2 * h, h);
  step->n = (ax.segment(2 * h, h).array() + step->r.array() * step->q.array()).tanh().matrix();
  step->h = ((1.0 - step->z.array()) * step->n.array() + step->z.array() * h_prev.array()).matrix();
}

Vec gru_backward(const MatIn &u, const GruStep &step, const VecIn &dh, VecOut dax, VecOut dah) {
  const Eigen::Index h = dh.size();
  const auto z = step.z.array();
  const auto r = step.r.array();
  const auto n = step.n.array();
  Eigen::ArrayXd dn = dh.array() * (1.0 - z);
  Eigen::ArrayXd dz = dh.array() * (step.h_prev.array() - n);
  Eigen::ArrayXd dan = dn * (1.0 - n * n);
  Eigen::ArrayXd dr = dan * step.q.array();
  dax.segment(0, h) = (dz * z * (1.0 - z)).matrix();
  dax.segment(h, h) = (dr * r * (1.0 - r)).matrix();
  dax.segment(2 * h, h) = dan.matrix();
  dah.segment(0, 2 * h) = dax.segment(0, 2 * h);
  dah.segment(2 * h, h) = (dan * r).matrix();
  Vec dh_prev = (dh.array() * z).matrix();
  dh_prev.noalias() += u.transpose() * dah;
  return dh_prev;
}

void attention_forward(const MatIn &wq, const VecIn &bias, const VecIn &score, const MatIn &keys,
                       const MatIn &enc, const VecIn &query, AttentionStep *step) {
  Vec pre = wq * query + bias;
  step->query = query;
  step->hidden = (keys.colwise() + pre).array().tanh().matrix();
  Vec energies = step->hidden.transpose() * score;
  step->weights = softmax(energies);
  step->context = enc * step->weights;
}

Vec attention_backward(const MatIn &wq, const VecIn &score, const MatIn &enc,
                       const AttentionStep &step, const VecIn &dcontext, MatOut dwq,
                       VecOut dbias, VecOut dscore, MatOut dkeys, MatOut denc) {
  const Vec &alpha = step.weights;
  Vec dalpha = enc.transpose() * dcontext;
  Vec de = (alpha.array() * (dalpha.array() - alpha.dot(dalpha))).matrix();
  denc.noalias() += dcontext * alpha.transpose();
  dscore.noalias() += step.hidden * de;
  Mat dpre_all = ((score * de.transpose()).array() * (1.0 - step.hidden.array().square())).matrix();
  dkeys += dpre_all;
  Vec dpre = dpre_all.rowwise().sum();
  dbias += dpre;
  dwq.noalias() += dpre * step.query.transpose();
  return wq.transpose() * dpre;
}

}  // namespace layers
}  // namespace nmt
}  // namespace normlex
