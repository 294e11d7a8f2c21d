#include "model/cadaft_model.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace cadaft {

void ModelDims::validate() const {
  if (input == 0) throw ConfigError("model.input must be positive");
  if (latent < 2) throw ConfigError("model.latent must be > 1");
  if (classes < 2) throw ConfigError("model.classes must be >= 2");
  if (domains < 1) throw ConfigError("model.domains must be >= 1");
  for (std::size_t a : confounder_arity) {
    if (a < 2) throw ConfigError("model.confounder_arity entries must be >= 2");
  }
}

namespace {

std::vector<std::size_t> chain(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

CadaftModel CadaftModel::init(const ModelDims& dims, Rng& rng) {
  dims.validate();
  CadaftModel m;
  m.dims = dims;
  m.extractor = init_mlp(chain(dims.input, dims.extractor_hidden, dims.latent), dims.activation, rng);
  m.task_head = init_mlp(chain(dims.latent, dims.head_hidden, dims.classes), dims.activation, rng);
  m.domain_head = init_mlp(chain(dims.latent, dims.head_hidden, dims.domains), dims.activation, rng);
  for (std::size_t arity : dims.confounder_arity) {
    m.confounder_heads.push_back(
        init_mlp(chain(dims.latent, dims.head_hidden, arity), dims.activation, rng));
  }
  return m;
}

ModelOutputs model_forward(const CadaftModel& m, const Tensor& x) {
  if (x.rank() != 2 || x.shape[1] != m.dims.input) {
    throw ShapeError("model_forward expects [B x " + std::to_string(m.dims.input) + "], got " +
                     shape_str(x.shape));
  }
  ModelOutputs out;
  out.z = m.extractor.eval(x);
  out.y_prob = softmax_value(m.task_head.eval(out.z));
  out.s_prob = softmax_value(m.domain_head.eval(out.z));
  out.t_prob.reserve(m.confounder_heads.size());
  for (const Mlp& head : m.confounder_heads) {
    out.t_prob.push_back(softmax_value(head.eval(out.z)));
  }
  return out;
}

TapedOutputs taped_forward(Tape& tape, CadaftModel& m, const Tensor& x, const TapedForwardFlags& flags) {
  TapedOutputs out;
  out.z = m.extractor.forward(tape, tape.input(x), flags.extractor_trainable);
  if (flags.want_task) {
    out.y_logits = m.task_head.forward(tape, out.z, flags.task_trainable);
  }
  if (flags.want_domain) {
    out.s_logits = m.domain_head.forward(tape, out.z, flags.domain_trainable);
  }
  if (flags.want_confounders) {
    out.t_logits.reserve(m.confounder_heads.size());
    for (Mlp& head : m.confounder_heads) {
      out.t_logits.push_back(head.forward(tape, out.z, flags.confounders_trainable));
    }
  }
  return out;
}

ParameterGroups parameter_groups(CadaftModel& m) {
  ParameterGroups g;
  for (Tensor* p : m.extractor.parameters()) g.extractor_and_heads.push_back(p);
  for (Tensor* p : m.task_head.parameters()) g.extractor_and_heads.push_back(p);
  for (Mlp& head : m.confounder_heads) {
    for (Tensor* p : head.parameters()) g.extractor_and_heads.push_back(p);
  }
  g.domain_only = m.domain_head.parameters();
  g.all = g.extractor_and_heads;
  g.all.insert(g.all.end(), g.domain_only.begin(), g.domain_only.end());
  return g;
}

std::size_t parameter_count(const CadaftModel& m) {
  std::size_t n = 0;
  for (const Tensor* p : parameter_groups(const_cast<CadaftModel&>(m)).all) n += p->numel();
  return n;
}

namespace {

constexpr const char* kMagic = "cadaft-checkpoint v1";

void write_array(std::ostream& os, const char* tag, const std::vector<double>& vals) {
  os << tag;
  char buf[40];
  for (double v : vals) {
    std::snprintf(buf, sizeof buf, " %a", v);
    os << buf;
  }
  os << "\n";
}

void write_mlp(std::ostream& os, const char* name, const Mlp& m) {
  os << name << " layers=" << m.layers.size() << "\n";
  for (const DenseLayer& l : m.layers) {
    os << "layer " << l.in_dim() << " " << l.out_dim() << " " << activation_to_string(l.activation)
       << "\n";
    write_array(os, "W", l.weight.values);
    write_array(os, "b", l.bias.values);
  }
}

std::vector<double> read_array(std::istream& is, const char* tag, std::size_t expect) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("checkpoint truncated before " + std::string(tag) + " array");
  std::istringstream ls(line);
  std::string head;
  ls >> head;
  if (head != tag) throw IoError("checkpoint expected '" + std::string(tag) + "' line, got '" + head + "'");
  std::vector<double> vals;
  vals.reserve(expect);
  std::string tok;
  while (ls >> tok) vals.push_back(std::strtod(tok.c_str(), nullptr));
  if (vals.size() != expect) {
    throw IoError("checkpoint array '" + std::string(tag) + "' has " + std::to_string(vals.size()) +
                  " entries, expected " + std::to_string(expect));
  }
  return vals;
}

Mlp read_mlp(std::istream& is, const std::string& name) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("checkpoint truncated before section " + name);
  std::istringstream hs(line);
  std::string got, layers_kv;
  hs >> got >> layers_kv;
  if (got != name || layers_kv.rfind("layers=", 0) != 0) {
    throw IoError("checkpoint expected section '" + name + "', got '" + line + "'");
  }
  const std::size_t nlayers = std::stoul(layers_kv.substr(7));
  Mlp m;
  for (std::size_t i = 0; i < nlayers; ++i) {
    if (!std::getline(is, line)) throw IoError("checkpoint truncated in section " + name);
    std::istringstream ls(line);
    std::string kw, act;
    std::size_t in = 0, out = 0;
    ls >> kw >> in >> out >> act;
    if (kw != "layer" || in == 0 || out == 0) {
      throw IoError("checkpoint bad layer line '" + line + "'");
    }
    DenseLayer l;
    l.weight = Tensor({in, out}, read_array(is, "W", in * out));
    l.bias = Tensor({out}, read_array(is, "b", out));
    l.activation = activation_from_string(act);
    m.layers.push_back(std::move(l));
  }
  return m;
}

}  // namespace

void save_checkpoint(const CadaftModel& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os << kMagic << "\n";
  os << "dims input=" << m.dims.input << " latent=" << m.dims.latent
     << " classes=" << m.dims.classes << " domains=" << m.dims.domains << "\n";
  os << "confounders";
  for (std::size_t a : m.dims.confounder_arity) os << " " << a;
  os << "\n";
  write_mlp(os, "extractor", m.extractor);
  write_mlp(os, "task_head", m.task_head);
  write_mlp(os, "domain_head", m.domain_head);
  for (std::size_t i = 0; i < m.confounder_heads.size(); ++i) {
    write_mlp(os, ("confounder_head_" + std::to_string(i)).c_str(), m.confounder_heads[i]);
  }
  if (!os) throw IoError("write failed for checkpoint: " + path);
}

CadaftModel load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(is, line) || line != kMagic) {
    throw IoError("unrecognized checkpoint header in " + path);
  }
  if (!std::getline(is, line)) throw IoError("checkpoint missing dims line");
  CadaftModel m;
  {
    std::istringstream ds(line);
    std::string kw, kv;
    ds >> kw;
    if (kw != "dims") throw IoError("checkpoint expected dims line, got '" + line + "'");
    while (ds >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw IoError("checkpoint bad dims token '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::size_t val = std::stoul(kv.substr(eq + 1));
      if (key == "input") m.dims.input = val;
      else if (key == "latent") m.dims.latent = val;
      else if (key == "classes") m.dims.classes = val;
      else if (key == "domains") m.dims.domains = val;
      else throw IoError("checkpoint unknown dims key '" + key + "'");
    }
  }
  if (!std::getline(is, line)) throw IoError("checkpoint missing confounders line");
  {
    std::istringstream cs(line);
    std::string kw;
    cs >> kw;
    if (kw != "confounders") throw IoError("checkpoint expected confounders line, got '" + line + "'");
    std::size_t a;
    while (cs >> a) m.dims.confounder_arity.push_back(a);
  }
  m.extractor = read_mlp(is, "extractor");
  m.task_head = read_mlp(is, "task_head");
  m.domain_head = read_mlp(is, "domain_head");
  for (std::size_t i = 0; i < m.dims.confounder_arity.size(); ++i) {
    m.confounder_heads.push_back(read_mlp(is, "confounder_head_" + std::to_string(i)));
  }
  // Recover architecture echo fields used only for reporting.
  m.dims.extractor_hidden.clear();
  for (std::size_t i = 0; i + 1 < m.extractor.layers.size(); ++i) {
    m.dims.extractor_hidden.push_back(m.extractor.layers[i].out_dim());
  }
  m.dims.head_hidden.clear();
  for (std::size_t i = 0; i + 1 < m.task_head.layers.size(); ++i) {
    m.dims.head_hidden.push_back(m.task_head.layers[i].out_dim());
  }
  if (!m.extractor.layers.empty() && m.extractor.layers.size() > 1) {
    m.dims.activation = m.extractor.layers.front().activation;
  }
  m.dims.validate();
  return m;
}

}  // namespace cadaft
