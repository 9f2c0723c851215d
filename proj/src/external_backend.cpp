#include "commcp/external_backend.hpp"

#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "commcp/errors.hpp"

namespace commcp {

struct TextCompletionClient::Impl {
  std::string host;
  int port = 0;
  int max_inflight = 1;
  int inflight = 0;
  std::mutex mu;
  std::condition_variable cv;
};

TextCompletionClient::TextCompletionClient(std::string host, int port, int max_inflight)
    : impl_(std::make_unique<Impl>()) {
  impl_->host = std::move(host);
  impl_->port = port;
  impl_->max_inflight = std::max(1, max_inflight);
}

TextCompletionClient::~TextCompletionClient() = default;

CompletionResponse TextCompletionClient::complete(const CompletionRequest& req) {
  if (!impl_) throw ExternalBackendError("client not configured");
  {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait(lock, [&] { return impl_->inflight < impl_->max_inflight; });
    ++impl_->inflight;
  }
  struct Release {
    Impl* impl;
    ~Release() {
      std::lock_guard lock(impl->mu);
      --impl->inflight;
      impl->cv.notify_one();
    }
  } release{impl_.get()};

  httplib::Client cli(impl_->host, impl_->port);
  cli.set_read_timeout(60, 0);
  nlohmann::json body = {{"system", req.system}, {"user", req.user}, {"max_tokens", req.max_tokens}};
  auto res = cli.Post("/complete", body.dump(), "application/json");
  if (!res) throw ExternalBackendError("endpoint unreachable: " + impl_->host);
  if (res->status != 200)
    throw ExternalBackendError("endpoint returned status " + std::to_string(res->status));
  try {
    nlohmann::json j = nlohmann::json::parse(res->body);
    CompletionResponse out;
    out.text = j.value("text", "");
    if (j.contains("first_token_probs")) {
      for (const auto& [k, v] : j["first_token_probs"].items())
        out.first_token_probs[k] = v.get<double>();
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ExternalBackendError(std::string("bad endpoint response: ") + e.what());
  }
}

namespace {

std::string read_template(const std::string& dir, const std::string& name) {
  std::ifstream in(dir + "/" + name);
  if (!in) throw ExternalBackendError("missing prompt template: " + dir + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

const PromptTemplates& PromptTemplates::load(const std::string& dir) {
  static std::mutex mu;
  static std::map<std::string, PromptTemplates> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(dir);
  if (it != cache.end()) return it->second;
  PromptTemplates t;
  t.perception_user = read_template(dir, "perception_user.txt");
  t.relevance_analysis_system = read_template(dir, "relevance_analysis_system.txt");
  t.relevance_analysis_user = read_template(dir, "relevance_analysis_user.txt");
  t.relevance_letter_system = read_template(dir, "relevance_letter_system.txt");
  t.relevance_letter_user = read_template(dir, "relevance_letter_user.txt");
  t.answer_letter_system = read_template(dir, "answer_letter_system.txt");
  t.answer_letter_user = read_template(dir, "answer_letter_user.txt");
  t.answer_relevance_user = read_template(dir, "answer_relevance_user.txt");
  return cache.emplace(dir, std::move(t)).first->second;
}

std::string substitute(std::string text, const std::map<std::string, std::string>& vars) {
  for (const auto& [key, value] : vars) {
    std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
      text.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return text;
}

namespace {

std::shared_ptr<TextCompletionClient> resolve_client(const OracleConfig& cfg) {
  if (cfg.client) return cfg.client;
  if (cfg.endpoint_port <= 0) throw ExternalBackendError("external mode needs an endpoint");
  return std::make_shared<TextCompletionClient>(cfg.endpoint_host, cfg.endpoint_port,
                                                cfg.max_inflight);
}

std::string observed_text(const ObjectInstance& obj) {
  Descriptor d{obj.name, obj.attributes};
  d.attributes.erase("count");
  d.attributes.erase("location_hint");
  d.attributes.erase("state");
  return descriptor_text(d);
}

}  // namespace

OptionProbPair external_relevance_options(const ObjectInstance& observed,
                                          const std::vector<Descriptor>& request_targets,
                                          const OracleConfig& cfg) {
  auto client = resolve_client(cfg);
  const PromptTemplates& t = PromptTemplates::load(cfg.prompts_dir);
  std::map<std::string, std::string> vars = {{"Request", descriptor_list_text(request_targets)},
                                             {"Observed", observed_text(observed)}};

  CompletionRequest stage1{substitute(t.relevance_analysis_system, vars),
                           substitute(t.relevance_analysis_user, vars), 256};
  CompletionResponse analysis = client->complete(stage1);

  vars["Analysis"] = analysis.text;
  CompletionRequest stage2{substitute(t.relevance_letter_system, vars),
                           substitute(t.relevance_letter_user, vars), 1};
  CompletionResponse letter = client->complete(stage2);

  // Single-token letters assumed; take the most probable of A-D.
  Option best = Option::C;
  double best_p = -1.0;
  for (char c = 'A'; c <= 'D'; ++c) {
    auto it = letter.first_token_probs.find(std::string(1, c));
    if (it != letter.first_token_probs.end() && it->second > best_p) {
      best_p = it->second;
      best = option_from_letter(c);
    }
  }
  if (best_p < 0.0) {
    if (letter.text.size() == 1 && letter.text[0] >= 'A' && letter.text[0] <= 'D') {
      best = option_from_letter(letter.text[0]);
      best_p = 1.0;
    } else {
      throw ExternalBackendError("endpoint returned no option letter probabilities");
    }
  }
  return OptionProbPair{observed.id, best, std::clamp(best_p, 0.0, 1.0)};
}

AnswerJudgment external_answer_judgment(const Question& question, const Observation& observation,
                                        const OracleConfig& cfg) {
  auto client = resolve_client(cfg);
  const PromptTemplates& t = PromptTemplates::load(cfg.prompts_dir);

  std::string observed;
  for (std::size_t i = 0; i < observation.visible_objects.size(); ++i) {
    if (i > 0) observed += ", ";
    observed += observed_text(observation.visible_objects[i]);
  }
  std::string choices;
  for (std::size_t i = 0; i < question.choices.size(); ++i) {
    if (i > 0) choices += " ";
    choices += std::string(1, label_of(static_cast<int>(i))) + ") " + question.choices[i];
  }
  std::map<std::string, std::string> vars = {
      {"question", question.text}, {"choices", choices}, {"Observed", observed}};

  CompletionRequest ans_req{substitute(t.answer_letter_system, vars),
                            substitute(t.answer_letter_user, vars), 1};
  CompletionResponse ans = client->complete(ans_req);

  AnswerJudgment j;
  j.dist.assign(question.choices.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < question.choices.size(); ++i) {
    auto it = ans.first_token_probs.find(std::string(1, label_of(static_cast<int>(i))));
    if (it != ans.first_token_probs.end()) {
      j.dist[i] = std::max(0.0, it->second);
      total += j.dist[i];
    }
  }
  if (total <= 0.0) throw ExternalBackendError("endpoint returned no answer letter probabilities");
  for (double& v : j.dist) v /= total;

  CompletionRequest rel_req{"", substitute(t.answer_relevance_user, vars), 1};
  CompletionResponse rel = client->complete(rel_req);
  double yes = 0.0, no = 0.0;
  auto ity = rel.first_token_probs.find("Yes");
  auto itn = rel.first_token_probs.find("No");
  if (ity != rel.first_token_probs.end()) yes = std::max(0.0, ity->second);
  if (itn != rel.first_token_probs.end()) no = std::max(0.0, itn->second);
  if (yes + no <= 0.0) throw ExternalBackendError("endpoint returned no yes/no probabilities");
  j.relevance = yes / (yes + no);
  return j;
}

}  // namespace commcp
