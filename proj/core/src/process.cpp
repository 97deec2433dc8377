#include "tampersim/process.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "tampersim/errors.hpp"

namespace tampersim {

namespace {

constexpr double kObjectiveTol = 1e-12;

std::string prefix_to_string(const Sequence& pfx) {
  std::string out = "[";
  for (std::size_t i = 0; i < pfx.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(pfx[i]);
  }
  return out + "]";
}

}  // namespace

ObjectiveFunction::ObjectiveFunction(std::string name, Fn fn)
    : name_(std::move(name)), fn_(std::move(fn)) {
  if (!fn_) throw ValidationError("objective function body is empty");
}

double ObjectiveFunction::operator()(const Sequence& full) const {
  const double v = fn_(full);
  if (!(v >= -kObjectiveTol && v <= 1.0 + kObjectiveTol)) {
    throw OutOfRange("objective value " + std::to_string(v) + " outside [0,1] at " +
                     prefix_to_string(full));
  }
  return std::min(1.0, std::max(0.0, v));
}

ObjectiveFunction ObjectiveFunction::constant(double c) {
  if (c < 0.0 || c > 1.0) throw OutOfRange("constant objective must lie in [0,1]");
  return ObjectiveFunction("constant:" + std::to_string(c),
                           [c](const Sequence&) { return c; });
}

ObjectiveFunction ObjectiveFunction::table(std::string name,
                                           std::vector<std::pair<Sequence, double>> values) {
  auto map = std::make_shared<std::unordered_map<Sequence, double, SequenceHash>>();
  for (auto& [seq, v] : values) {
    if (v < 0.0 || v > 1.0) throw OutOfRange("table objective value outside [0,1]");
    (*map)[seq] = v;
  }
  return ObjectiveFunction(std::move(name), [map](const Sequence& full) {
    const auto it = map->find(full);
    if (it == map->end()) {
      throw OutOfRange("table objective has no entry for " + prefix_to_string(full));
    }
    return it->second;
  });
}

// ---------------------------------------------------------------------------
// RandomProcess
// ---------------------------------------------------------------------------

struct RandomProcess::Impl {
  int n = 0;
  Flavor flavor = Flavor::Explicit;
  std::vector<std::vector<Symbol>> alphabet;
  ConditionalFn conditional;  // null for sampler-only processes
  SamplerFn sampler;          // null for rule-backed processes
};

RandomProcess::RandomProcess(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

int RandomProcess::block_count() const { return impl_->n; }
RandomProcess::Flavor RandomProcess::flavor() const { return impl_->flavor; }
bool RandomProcess::has_exact_conditionals() const { return static_cast<bool>(impl_->conditional); }
const std::vector<std::vector<Symbol>>& RandomProcess::alphabet() const {
  return impl_->alphabet;
}

namespace {

void check_alphabet(const std::vector<std::vector<Symbol>>& alphabet) {
  if (alphabet.empty()) throw ValidationError("process needs at least one block");
  for (const auto& pos : alphabet) {
    if (pos.empty()) throw ValidationError("every position needs a nonempty alphabet");
  }
}

bool in_alphabet(const std::vector<Symbol>& pos, Symbol s) {
  return std::find(pos.begin(), pos.end(), s) != pos.end();
}

}  // namespace

RandomProcess RandomProcess::explicit_tree(std::vector<std::vector<Symbol>> alphabet,
                                           std::vector<std::pair<Sequence, Distribution>> nodes) {
  check_alphabet(alphabet);
  const int n = static_cast<int>(alphabet.size());

  auto table = std::make_shared<std::unordered_map<Sequence, Distribution, SequenceHash>>();
  for (auto& [pfx, dist] : nodes) {
    if (static_cast<int>(pfx.size()) >= n) {
      throw ValidationError("conditional node at full-length prefix " + prefix_to_string(pfx));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (!in_alphabet(alphabet[pfx.size()], dist.symbols()[i])) {
        throw ValidationError("symbol " + std::to_string(dist.symbols()[i]) +
                              " not in alphabet at position " + std::to_string(pfx.size()));
      }
      total += dist.probs()[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ValidationError("conditional at " + prefix_to_string(pfx) +
                            " sums to " + std::to_string(total));
    }
    if (!table->emplace(std::move(pfx), std::move(dist)).second) {
      throw ValidationError("duplicate conditional node");
    }
  }

  // Every positive branch must lead to another node until full length.
  Sequence buf;
  const std::function<void(Sequence&)> walk = [&](Sequence& pfx) {
    const auto it = table->find(pfx);
    if (it == table->end()) {
      throw ValidationError("missing conditional node for valid prefix " + prefix_to_string(pfx));
    }
    if (static_cast<int>(pfx.size()) + 1 == n) return;
    for (Symbol s : it->second.symbols()) {
      pfx.push_back(s);
      walk(pfx);
      pfx.pop_back();
    }
  };
  walk(buf);

  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->flavor = Flavor::Explicit;
  impl->alphabet = std::move(alphabet);
  impl->conditional = [table](const Sequence& pfx) -> Distribution {
    const auto it = table->find(pfx);
    if (it == table->end()) {
      throw InvalidPrefix("no conditional stored for prefix " + prefix_to_string(pfx));
    }
    return it->second;
  };
  return RandomProcess(std::move(impl));
}

RandomProcess RandomProcess::bernoulli_iid(int n, double p) {
  if (n < 1) throw OutOfRange("bernoulli_iid: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw OutOfRange("bernoulli_iid: p must lie in [0,1]");
  Distribution law = Distribution::from_pairs({{0, 1.0 - p}, {1, p}}, 1e-12);
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->flavor = Flavor::Explicit;
  impl->alphabet.assign(static_cast<std::size_t>(n), {0, 1});
  impl->conditional = [law](const Sequence&) { return law; };
  return RandomProcess(std::move(impl));
}

RandomProcess RandomProcess::markov(int n, std::vector<double> initial,
                                    std::vector<std::vector<double>> transition) {
  if (n < 1) throw OutOfRange("markov: n must be >= 1");
  const std::size_t states = initial.size();
  if (states == 0) throw ValidationError("markov: empty state space");
  if (transition.size() != states) throw ValidationError("markov: transition row count mismatch");

  const auto row_to_dist = [&](const std::vector<double>& row) {
    if (row.size() != states) throw ValidationError("markov: transition row size mismatch");
    std::vector<std::pair<Symbol, double>> items;
    items.reserve(states);
    for (std::size_t s = 0; s < states; ++s) items.emplace_back(static_cast<Symbol>(s), row[s]);
    return Distribution::from_pairs(std::move(items), 1e-12);
  };

  auto init = std::make_shared<Distribution>(row_to_dist(initial));
  auto rows = std::make_shared<std::vector<Distribution>>();
  rows->reserve(states);
  for (const auto& row : transition) rows->push_back(row_to_dist(row));

  std::vector<Symbol> state_symbols;
  for (std::size_t s = 0; s < states; ++s) state_symbols.push_back(static_cast<Symbol>(s));

  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->flavor = Flavor::Explicit;
  impl->alphabet.assign(static_cast<std::size_t>(n), state_symbols);
  impl->conditional = [init, rows](const Sequence& pfx) -> Distribution {
    if (pfx.empty()) return *init;
    return (*rows)[static_cast<std::size_t>(pfx.back())];
  };
  return RandomProcess(std::move(impl));
}

RandomProcess RandomProcess::product(std::vector<Distribution> block_laws) {
  if (block_laws.empty()) throw ValidationError("product process needs at least one block law");
  auto laws = std::make_shared<std::vector<Distribution>>(std::move(block_laws));
  auto impl = std::make_shared<Impl>();
  impl->n = static_cast<int>(laws->size());
  impl->flavor = Flavor::Explicit;
  for (const auto& law : *laws) impl->alphabet.push_back(law.symbols());
  impl->conditional = [laws](const Sequence& pfx) { return (*laws)[pfx.size()]; };
  return RandomProcess(std::move(impl));
}

RandomProcess RandomProcess::generative(std::vector<std::vector<Symbol>> alphabet,
                                        SamplerFn sampler, ConditionalFn exact) {
  check_alphabet(alphabet);
  if (!sampler) throw ValidationError("generative process needs a sampler");
  auto impl = std::make_shared<Impl>();
  impl->n = static_cast<int>(alphabet.size());
  impl->flavor = Flavor::Generative;
  impl->alphabet = std::move(alphabet);
  impl->sampler = std::move(sampler);
  impl->conditional = std::move(exact);
  return RandomProcess(std::move(impl));
}

bool RandomProcess::is_valid_prefix(const Sequence& pfx) const {
  const Impl& im = *impl_;
  if (static_cast<int>(pfx.size()) > im.n) return false;
  for (std::size_t i = 0; i < pfx.size(); ++i) {
    if (!in_alphabet(im.alphabet[i], pfx[i])) return false;
  }
  if (!im.conditional) return true;  // relative to the declared alphabet
  Sequence buf;
  buf.reserve(pfx.size());
  for (Symbol s : pfx) {
    if (im.conditional(buf).prob_of(s) <= 0.0) return false;
    buf.push_back(s);
  }
  return true;
}

Distribution RandomProcess::conditional_next(const Sequence& pfx) const {
  const Impl& im = *impl_;
  if (!im.conditional) {
    throw UnsupportedFlavor("process carries no exact conditional distributions");
  }
  if (static_cast<int>(pfx.size()) >= im.n || !is_valid_prefix(pfx)) {
    throw InvalidPrefix("conditional_next: invalid or full-length prefix " +
                        prefix_to_string(pfx));
  }
  return im.conditional(pfx);
}

Symbol RandomProcess::sample_next(const Sequence& pfx, RandomSource& rng) const {
  const Impl& im = *impl_;
  if (static_cast<int>(pfx.size()) >= im.n || !is_valid_prefix(pfx)) {
    throw InvalidPrefix("sample_next: invalid or full-length prefix " + prefix_to_string(pfx));
  }
  if (im.sampler) {
    const Symbol s = im.sampler(pfx, rng);
    if (!in_alphabet(im.alphabet[pfx.size()], s)) {
      throw SamplerContractViolation("sampler emitted undeclared symbol " + std::to_string(s) +
                                     " at position " + std::to_string(pfx.size()));
    }
    return s;
  }
  return im.conditional(pfx).sample(rng);
}

Sequence RandomProcess::sample_continuation(const Sequence& pfx, RandomSource& rng) const {
  const Impl& im = *impl_;
  if (!is_valid_prefix(pfx)) {
    throw InvalidPrefix("sample_continuation: invalid prefix " + prefix_to_string(pfx));
  }
  Sequence seq = pfx;
  seq.reserve(static_cast<std::size_t>(im.n));
  while (static_cast<int>(seq.size()) < im.n) {
    if (im.sampler) {
      const Symbol s = im.sampler(seq, rng);
      if (!in_alphabet(im.alphabet[seq.size()], s)) {
        throw SamplerContractViolation("sampler emitted undeclared symbol " + std::to_string(s) +
                                       " at position " + std::to_string(seq.size()));
      }
      seq.push_back(s);
    } else {
      seq.push_back(im.conditional(seq).sample(rng));
    }
  }
  return seq;
}

double partial_expectation(const RandomProcess& proc, const ObjectiveFunction& f,
                           const Sequence& pfx) {
  if (!proc.has_exact_conditionals()) {
    throw UnsupportedFlavor("exact partial expectation needs exact conditionals");
  }
  if (!proc.is_valid_prefix(pfx)) {
    throw InvalidPrefix("partial_expectation: invalid prefix " + prefix_to_string(pfx));
  }
  const int n = proc.block_count();
  Sequence buf = pfx;
  const std::function<double()> rec = [&]() -> double {
    if (static_cast<int>(buf.size()) == n) return f(buf);
    const Distribution d = proc.conditional_next(buf);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      buf.push_back(d.symbols()[i]);
      acc += d.probs()[i] * rec();
      buf.pop_back();
    }
    return acc;
  };
  return rec();
}

double partial_expectation_mc(const RandomProcess& proc, const ObjectiveFunction& f,
                              const Sequence& pfx, long long trials, RandomSource& rng) {
  if (trials < 1) throw OutOfRange("partial_expectation_mc: trials must be >= 1");
  if (!proc.is_valid_prefix(pfx)) {
    throw InvalidPrefix("partial_expectation_mc: invalid prefix " + prefix_to_string(pfx));
  }
  double acc = 0.0;
  for (long long t = 0; t < trials; ++t) {
    acc += f(proc.sample_continuation(pfx, rng));
  }
  return acc / static_cast<double>(trials);
}

// ---------------------------------------------------------------------------
// Definition files and the objective registry
// ---------------------------------------------------------------------------

RandomProcess load_process(const nlohmann::json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "bernoulli_iid") {
      return RandomProcess::bernoulli_iid(spec.at("n").get<int>(), spec.at("p").get<double>());
    }
    if (kind == "markov") {
      return RandomProcess::markov(spec.at("n").get<int>(),
                                   spec.at("initial").get<std::vector<double>>(),
                                   spec.at("transition").get<std::vector<std::vector<double>>>());
    }
    if (kind == "explicit") {
      auto alphabet = spec.at("alphabet").get<std::vector<std::vector<Symbol>>>();
      std::vector<std::pair<Sequence, Distribution>> nodes;
      for (const auto& node : spec.at("nodes")) {
        std::vector<std::pair<Symbol, double>> items;
        for (const auto& entry : node.at("next")) {
          items.emplace_back(entry.at(0).get<Symbol>(), entry.at(1).get<double>());
        }
        nodes.emplace_back(node.at("prefix").get<Sequence>(),
                           Distribution::from_pairs(std::move(items), 1e-12));
      }
      return RandomProcess::explicit_tree(std::move(alphabet), std::move(nodes));
    }
    throw ValidationError("unknown process kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("process definition: ") + e.what());
  }
}

ObjectiveFunction make_objective(const std::string& name, const RandomProcess& proc) {
  const int n = proc.block_count();
  if (name == "and") {
    return ObjectiveFunction("and", [](const Sequence& x) {
      for (Symbol s : x) {
        if (s == 0) return 0.0;
      }
      return 1.0;
    });
  }
  if (name == "or") {
    return ObjectiveFunction("or", [](const Sequence& x) {
      for (Symbol s : x) {
        if (s != 0) return 1.0;
      }
      return 0.0;
    });
  }
  if (name == "parity") {
    return ObjectiveFunction("parity", [](const Sequence& x) {
      long long sum = 0;
      for (Symbol s : x) sum += s;
      return static_cast<double>(((sum % 2) + 2) % 2);
    });
  }
  Symbol max_symbol = 1;
  for (const auto& pos : proc.alphabet()) {
    for (Symbol s : pos) max_symbol = std::max(max_symbol, s);
  }
  const double scale = static_cast<double>(n) * static_cast<double>(max_symbol);
  const auto mean_fn = [scale](const Sequence& x) {
    double sum = 0.0;
    for (Symbol s : x) sum += static_cast<double>(s);
    return sum / scale;
  };
  if (name == "mean") return ObjectiveFunction("mean", mean_fn);
  if (name.rfind("threshold:", 0) == 0) {
    const double t = std::stod(name.substr(10));
    return ObjectiveFunction(name, [mean_fn, t](const Sequence& x) {
      return mean_fn(x) >= t ? 1.0 : 0.0;
    });
  }
  throw ValidationError("unknown objective: " + name);
}

ObjectiveFunction objective_from_json(const nlohmann::json& spec, const RandomProcess& proc) {
  try {
    if (spec.is_string()) return make_objective(spec.get<std::string>(), proc);
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "constant") return ObjectiveFunction::constant(spec.at("value").get<double>());
    if (kind == "table") {
      std::vector<std::pair<Sequence, double>> values;
      for (const auto& entry : spec.at("values")) {
        values.emplace_back(entry.at(0).get<Sequence>(), entry.at(1).get<double>());
      }
      return ObjectiveFunction::table("table", std::move(values));
    }
    throw ValidationError("unknown objective kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("objective definition: ") + e.what());
  }
}

}  // namespace tampersim
