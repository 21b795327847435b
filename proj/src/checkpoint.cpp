#include "ids/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ids {

namespace {

constexpr const char* kMagic = "ids-checkpoint 1";

std::string expect_line(std::istringstream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError(std::string("truncated checkpoint: missing ") + what);
  return line;
}

int expect_int(std::istringstream& in, const std::string& key) {
  std::istringstream ls(expect_line(in, key.c_str()));
  std::string k;
  int v;
  if (!(ls >> k >> v) || k != key) throw CheckpointError("expected '" + key + " <int>'");
  return v;
}

std::string joined(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& x : items) s += " " + x;
  return s;
}

std::vector<std::string> tagged_list(std::istringstream& in, const std::string& tag) {
  std::istringstream ls(expect_line(in, tag.c_str()));
  std::string k, x;
  if (!(ls >> k) || k != tag) throw CheckpointError("expected '" + tag + " ...'");
  std::vector<std::string> out;
  while (ls >> x) out.push_back(x);
  return out;
}

}  // namespace

std::string format_checkpoint(const QFunction& q, const Corpus& corpus) {
  std::unique_ptr<QFunction> copy = q.clone();
  std::vector<ParamRef> blocks = copy->blocks();
  std::string out = std::string(kMagic) + "\nmodel " + q.model() + "\n";
  if (auto* e = dynamic_cast<const EmbeddedQ*>(&q)) {
    out += "d " + std::to_string(e->params().dims.d) + "\nd_lin " + std::to_string(e->params().dims.d_lin) + "\n";
    out += "predicates" + joined(e->vocab().predicates()) + "\nargs" + joined(e->vocab().args()) + "\n";
  } else if (auto* b = dynamic_cast<const BagMlpQ*>(&q)) {
    out += "hidden " + std::to_string(b->params().W1.rows()) + "\n";
  } else {
    throw CheckpointError("cannot save model '" + q.model() + "'");
  }

  std::string ctext = format_corpus(corpus);
  int lines = 0;
  for (char ch : ctext) lines += ch == '\n';
  if (!ctext.empty() && ctext.back() != '\n') {
    ctext += '\n';
    ++lines;
  }
  out += "corpus " + std::to_string(lines) + "\n" + ctext;

  char buf[32];
  for (const auto& b : blocks) {
    const Eigen::MatrixXd& m = *b.value;
    out += "block " + b.name + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
        if (c) out += ' ';
        out += buf;
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

void save_checkpoint(const std::string& path, const QFunction& q, const Corpus& corpus) {
  const std::string text = format_checkpoint(q, corpus);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot write " + path);
  f << text;
  if (!f) throw CheckpointError("failed writing " + path);
}

LoadedModel parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  if (expect_line(in, "header") != kMagic) throw CheckpointError("not a checkpoint (bad header)");
  std::string model_line = expect_line(in, "model");
  if (model_line.rfind("model ", 0) != 0) throw CheckpointError("expected 'model <name>'");
  const std::string model = model_line.substr(6);

  int d = 0, d_lin = 0, hidden = 0;
  std::vector<std::string> predicates, args;
  if (model == "embedded") {
    d = expect_int(in, "d");
    d_lin = expect_int(in, "d_lin");
    if (d < 1 || d_lin < 1) throw CheckpointError("bad embedding sizes");
    predicates = tagged_list(in, "predicates");
    args = tagged_list(in, "args");
  } else if (model == "bagmlp") {
    hidden = expect_int(in, "hidden");
    if (hidden < 1) throw CheckpointError("bad hidden size");
  } else {
    throw CheckpointError("unknown model '" + model + "'");
  }

  const int lines = expect_int(in, "corpus");
  std::string ctext;
  for (int i = 0; i < lines; ++i) ctext += expect_line(in, "corpus line") + "\n";
  LoadedModel out;
  try {
    out.corpus = parse_corpus(ctext);
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("bad corpus in checkpoint: ") + e.what());
  }
  auto index = std::make_shared<const CorpusIndex>(out.corpus);

  EmbParams ep;
  MlpParams mp;
  std::vector<ParamRef> blocks;
  if (model == "embedded") {
    const Vocab vocab = EmbeddedQ::vocab_for(*index);
    if (vocab.predicates() != predicates || vocab.args() != args)
      throw CheckpointError("checkpoint vocabulary does not match its corpus");
    ep = EmbParams::zeros(EmbeddedQ::dims_for(vocab, d, d_lin));
    blocks = ep.blocks();
  } else {
    mp = MlpParams::zeros(BagLayout(*index).size(), hidden, hidden);
    blocks = mp.blocks();
  }
  std::map<std::string, Eigen::MatrixXd*> by_name;
  for (auto& b : blocks) by_name[b.name] = b.value;

  std::size_t seen = 0;
  for (;;) {
    std::istringstream ls(expect_line(in, "block or end"));
    std::string tag, name;
    ls >> tag;
    if (tag == "end") break;
    long rows, cols;
    if (tag != "block" || !(ls >> name >> rows >> cols)) throw CheckpointError("expected 'block <name> <rows> <cols>'");
    auto it = by_name.find(name);
    if (it == by_name.end()) throw CheckpointError("unknown or repeated block '" + name + "'");
    Eigen::MatrixXd& m = *it->second;
    if (m.rows() != rows || m.cols() != cols)
      throw CheckpointError("block " + name + " has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                            ", corpus implies " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    for (long r = 0; r < rows; ++r) {
      std::istringstream row(expect_line(in, "block row"));
      for (long c = 0; c < cols; ++c) {
        std::string tok;
        if (!(row >> tok)) throw CheckpointError("short row in block " + name);
        try {
          std::size_t used = 0;
          m(r, c) = std::stod(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw CheckpointError("bad number '" + tok + "' in block " + name);
        }
      }
    }
    by_name.erase(it);
    ++seen;
  }
  if (seen != blocks.size()) throw CheckpointError("checkpoint is missing parameter blocks");

  if (model == "embedded")
    out.q = std::make_shared<EmbeddedQ>(index, std::move(ep));
  else
    out.q = std::make_shared<BagMlpQ>(index, std::move(mp));
  return out;
}

LoadedModel load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace ids
