// SPDX-License-Identifier: Apache-2.0
//
// Plain-text checkpoints. Line 1 is `MSRL-CKPT v1`; every later record is a
// tensor: a header line `name rows cols` followed by rows*cols row-major
// decimals (%.17g, so a round trip is bit-exact). Record order:
//
//   meta.kind meta.dims meta.episodes_done meta.actor_sizes
//   meta.critic_sizes meta.flags
//   per agent v:  agent<v>.{client,client_head,server,server_head}.<l>.{w,b}
//                 agent<v>.ctrl.state  agent<v>.ctrl.entropy  agent<v>.ctrl.log
//                 agent<v>.adam.<group>.{step,m.<l>.w,m.<l>.b,v.<l>.w,v.<l>.b}
//   per critic c: critic<c>.<l>.{w,b}  critic<c>.adam.{...}
//
// Biases are stored as (out x 1). Empty Adam moments are written as 0 x 0.

#ifndef MSRL_CHECKPOINT_HPP_
#define MSRL_CHECKPOINT_HPP_

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "msrl/io.hpp"
#include "msrl/msrl.hpp"

namespace msrl {

inline constexpr const char* kCheckpointMagic = "MSRL-CKPT v1";

struct Tensor {
  long rows = 0, cols = 0;
  std::vector<double> values;
};

class CheckpointWriter {
 public:
  CheckpointWriter() { out_ << kCheckpointMagic << '\n'; }

  void tensor(const std::string& name, long rows, long cols, const double* row_major) {
    out_ << name << ' ' << rows << ' ' << cols << '\n';
    for (long r = 0; r < rows; ++r) {
      for (long c = 0; c < cols; ++c) {
        if (c) out_ << ' ';
        out_ << fmt_double17(row_major[r * cols + c]);
      }
      out_ << '\n';
    }
  }

  void values(const std::string& name, const std::vector<double>& v) {
    tensor(name, 1, static_cast<long>(v.size()), v.data());
  }

  void matrix(const std::string& name, const Mat& m) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    tensor(name, m.rows(), m.cols(), rm.data());
  }

  void vector(const std::string& name, const Vec& v) { tensor(name, v.size(), 1, v.data()); }

  void params(const std::string& prefix, const Params& p) {
    for (std::size_t l = 0; l < p.size(); ++l) {
      matrix(prefix + "." + std::to_string(l) + ".w", p[l].w);
      vector(prefix + "." + std::to_string(l) + ".b", p[l].b);
    }
  }

  void adam(const std::string& prefix, const AdamState& st, std::size_t layers) {
    values(prefix + ".step", {static_cast<double>(st.step)});
    for (const char* which : {"m", "v"}) {
      const Params& p = which[0] == 'm' ? st.m : st.v;
      for (std::size_t l = 0; l < layers; ++l) {
        const auto base = prefix + "." + which + "." + std::to_string(l);
        if (p.empty()) {
          tensor(base + ".w", 0, 0, nullptr);
          tensor(base + ".b", 0, 0, nullptr);
        } else {
          matrix(base + ".w", p[l].w);
          vector(base + ".b", p[l].b);
        }
      }
    }
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

class CheckpointReader {
 public:
  explicit CheckpointReader(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCheckpointMagic)
      throw ParseError("not a checkpoint (missing '" + std::string(kCheckpointMagic) + "')", 1);
    std::string name;
    long rows = 0, cols = 0;
    while (in >> name) {
      if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw ParseError("bad tensor header for '" + name + "'", 0);
      Tensor t{rows, cols, {}};
      t.values.resize(static_cast<std::size_t>(rows * cols));
      for (auto& v : t.values) {
        std::string tok;
        if (!(in >> tok)) throw ParseError("truncated tensor '" + name + "'", 0);
        auto d = parse_double(tok);
        if (!d) throw ParseError("bad value in tensor '" + name + "'", 0);
        v = *d;
      }
      if (!tensors_.emplace(name, std::move(t)).second)
        throw ParseError("duplicate tensor '" + name + "'", 0);
    }
  }

  bool has(const std::string& name) const { return tensors_.count(name) != 0; }

  const Tensor& get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw ParseError("checkpoint lacks tensor '" + name + "'", 0);
    return it->second;
  }

  std::vector<double> values(const std::string& name) const { return get(name).values; }

  void read_matrix(const std::string& name, Mat& m) const {
    const auto& t = get(name);
    if (t.rows != m.rows() || t.cols != m.cols())
      throw ParseError("shape mismatch for '" + name + "'", 0);
    for (long r = 0; r < t.rows; ++r)
      for (long c = 0; c < t.cols; ++c) m(r, c) = t.values[static_cast<std::size_t>(r * t.cols + c)];
  }

  void read_vector(const std::string& name, Vec& v) const {
    const auto& t = get(name);
    if (t.rows != v.size() || t.cols != 1) throw ParseError("shape mismatch for '" + name + "'", 0);
    for (long r = 0; r < t.rows; ++r) v[r] = t.values[static_cast<std::size_t>(r)];
  }

  void read_params(const std::string& prefix, Params& p) const {
    for (std::size_t l = 0; l < p.size(); ++l) {
      read_matrix(prefix + "." + std::to_string(l) + ".w", p[l].w);
      read_vector(prefix + "." + std::to_string(l) + ".b", p[l].b);
    }
  }

  void read_adam(const std::string& prefix, AdamState& st, const Params& like) const {
    st.step = static_cast<long>(values(prefix + ".step").at(0));
    if (get(prefix + ".m.0.w").rows == 0) {
      st.m.clear();
      st.v.clear();
      return;
    }
    st.m = zeros_like(like);
    st.v = zeros_like(like);
    read_params(prefix + ".m", st.m);
    read_params(prefix + ".v", st.v);
  }

 private:
  std::map<std::string, Tensor> tensors_;
};

namespace detail {

inline std::vector<double> as_doubles(const std::vector<int>& v) {
  return {v.begin(), v.end()};
}

inline std::vector<int> as_ints(const std::vector<double>& v) {
  std::vector<int> out;
  for (double d : v) out.push_back(static_cast<int>(d));
  return out;
}

}  // namespace detail

inline std::string checkpoint_string(const PolicyBundle& b) {
  CheckpointWriter w;
  w.values("meta.kind", {static_cast<double>(b.kind)});
  w.values("meta.dims", {static_cast<double>(b.obs_dim), static_cast<double>(b.num_actions),
                         static_cast<double>(b.num_agents)});
  w.values("meta.episodes_done", {static_cast<double>(b.episodes_done)});
  w.values("meta.actor_sizes", detail::as_doubles(b.cfg.actor_sizes));
  w.values("meta.critic_sizes", detail::as_doubles(b.cfg.critic_sizes));
  w.values("meta.flags", {static_cast<double>(b.cfg.split_index), b.cfg.critic_per_agent ? 1.0 : 0.0});
  for (std::size_t v = 0; v < b.agents.size(); ++v) {
    const auto& a = b.agents[v];
    const auto p = "agent" + std::to_string(v);
    w.params(p + ".client", a.actor.client().params());
    w.params(p + ".client_head", a.actor.client_head().params());
    w.params(p + ".server", a.actor.server().params());
    w.params(p + ".server_head", a.actor.server_head().params());
    const auto& c = a.ctrl;
    w.values(p + ".ctrl.state", {static_cast<double>(c.calls()), static_cast<double>(c.server_calls()),
                                 static_cast<double>(c.holds()), static_cast<double>(c.hold_remaining())});
    const std::vector<double> ent(c.entropy_window().begin(), c.entropy_window().end());
    w.tensor(p + ".ctrl.entropy", static_cast<long>(ent.size()), 1, ent.data());
    std::vector<double> log;
    for (auto m : c.switch_log()) log.push_back(m == ModelChoice::kServer ? 1.0 : 0.0);
    w.tensor(p + ".ctrl.log", static_cast<long>(log.size()), 1, log.data());
    w.adam(p + ".adam.client", a.opt_client, a.actor.client().params().size());
    w.adam(p + ".adam.client_head", a.opt_client_head, a.actor.client_head().params().size());
    w.adam(p + ".adam.server", a.opt_server, a.actor.server().params().size());
    w.adam(p + ".adam.server_head", a.opt_server_head, a.actor.server_head().params().size());
  }
  for (std::size_t c = 0; c < b.critics.size(); ++c) {
    const auto p = "critic" + std::to_string(c);
    w.params(p, b.critics[c].net().params());
    w.adam(p + ".adam", b.critic_opt[c], b.critics[c].net().params().size());
  }
  return w.str();
}

inline void save_checkpoint(const std::filesystem::path& path, const PolicyBundle& b) {
  write_file_atomic(path, checkpoint_string(b));
}

// `cfg` supplies the hyperparameters (lr, switching constants, ...); the
// network shapes always come from the file.
inline PolicyBundle load_checkpoint(std::istream& in, TrainConfig cfg) {
  CheckpointReader r(in);
  const auto kind = static_cast<PolicyKind>(static_cast<int>(r.values("meta.kind").at(0)));
  const auto dims = detail::as_ints(r.values("meta.dims"));
  if (dims.size() != 3) throw ParseError("meta.dims must hold 3 values", 0);
  cfg.actor_sizes = detail::as_ints(r.values("meta.actor_sizes"));
  cfg.critic_sizes = detail::as_ints(r.values("meta.critic_sizes"));
  const auto flags = r.values("meta.flags");
  cfg.split_index = static_cast<int>(flags.at(0));
  cfg.critic_per_agent = flags.at(1) != 0.0;
  cfg.validate();
  PolicyBundle b = PolicyBundle::create(kind, cfg, dims[0], dims[1], dims[2]);
  b.episodes_done = static_cast<int>(r.values("meta.episodes_done").at(0));
  for (std::size_t v = 0; v < b.agents.size(); ++v) {
    auto& a = b.agents[v];
    const auto p = "agent" + std::to_string(v);
    r.read_params(p + ".client", a.actor.client().params());
    r.read_params(p + ".client_head", a.actor.client_head().params());
    r.read_params(p + ".server", a.actor.server().params());
    r.read_params(p + ".server_head", a.actor.server_head().params());
    const auto st = r.values(p + ".ctrl.state");
    if (st.size() != 4) throw ParseError(p + ".ctrl.state must hold 4 values", 0);
    const auto ent = r.values(p + ".ctrl.entropy");
    std::deque<ModelChoice> log;
    for (double d : r.values(p + ".ctrl.log"))
      log.push_back(d != 0.0 ? ModelChoice::kServer : ModelChoice::kClient);
    a.ctrl.restore(static_cast<long long>(st[0]), static_cast<long long>(st[1]),
                   static_cast<long long>(st[2]), static_cast<int>(st[3]),
                   std::deque<double>(ent.begin(), ent.end()), std::move(log));
    r.read_adam(p + ".adam.client", a.opt_client, a.actor.client().params());
    r.read_adam(p + ".adam.client_head", a.opt_client_head, a.actor.client_head().params());
    r.read_adam(p + ".adam.server", a.opt_server, a.actor.server().params());
    r.read_adam(p + ".adam.server_head", a.opt_server_head, a.actor.server_head().params());
  }
  for (std::size_t c = 0; c < b.critics.size(); ++c) {
    const auto p = "critic" + std::to_string(c);
    r.read_params(p, b.critics[c].net().params());
    r.read_adam(p + ".adam", b.critic_opt[c], b.critics[c].net().params());
  }
  return b;
}

inline PolicyBundle load_checkpoint(const std::filesystem::path& path, const TrainConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return load_checkpoint(in, cfg);
}

}  // namespace msrl

#endif  // MSRL_CHECKPOINT_HPP_
