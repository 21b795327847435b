// Times the serial and OpenMP versions of the two parallel kernels:
// minibatch gradients and evaluation over independent dialogs.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "ids/config.hpp"
#include "ids/evaluation.hpp"
#include "ids/gradient_check.hpp"
#include "ids/qfunction.hpp"

using namespace ids;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int dialogs = argc > 1 ? std::atoi(argv[1]) : 400;
  const Corpus corpus = load_corpus(shipped_corpus_path());
  auto ix = std::make_shared<const CorpusIndex>(corpus);
  std::printf("threads: %d\n", omp_get_max_threads());

  Rng rng(7);
  std::vector<StateCode> states;
  std::vector<ActCode> acts;
  for (int i = 0; i < 256; ++i) {
    ReachableSample s = sample_reachable(corpus, rng);
    states.push_back(ix->encode(s.view));
    acts.push_back(ix->encode(s.act));
  }
  std::vector<Sample> batch;
  std::vector<double> up;
  for (std::size_t i = 0; i < states.size(); ++i) {
    batch.push_back({&states[i], &acts[i], 0.0});
    up.push_back(1.0 / states.size());
  }

  EmbeddedQ emb(ix, 5, 10, rng);
  BagMlpQ bag(ix, 64, rng);
  for (const QFunction* q : {static_cast<const QFunction*>(&emb), static_cast<const QFunction*>(&bag)}) {
    std::vector<Eigen::MatrixXd> gs, gp;
    const double ts = seconds([&] { for (int r = 0; r < 20; ++r) gs = q->gradient(batch, up, Exec::Serial); });
    const double tp = seconds([&] { for (int r = 0; r < 20; ++r) gp = q->gradient(batch, up, Exec::Parallel); });
    bool same = gs.size() == gp.size();
    for (std::size_t k = 0; same && k < gs.size(); ++k) same = gs[k] == gp[k];
    std::printf("gradient %-8s serial %.3fs parallel %.3fs speedup %.2fx identical %s\n", q->model().c_str(), ts,
                tp, ts / tp, same ? "yes" : "NO");
  }

  BaselinePolicy base;
  EvalConfig ec;
  ec.n_dialogs = dialogs;
  EvalCurve cs, cp;
  ec.exec = Exec::Serial;
  const double ts = seconds([&] { cs = evaluate(base, corpus, ec); });
  ec.exec = Exec::Parallel;
  const double tp = seconds([&] { cp = evaluate(base, corpus, ec); });
  std::printf("evaluate %d dialogs serial %.3fs parallel %.3fs speedup %.2fx identical %s\n", dialogs, ts, tp,
              ts / tp, cs.success_turn == cp.success_turn ? "yes" : "NO");
  return 0;
}
