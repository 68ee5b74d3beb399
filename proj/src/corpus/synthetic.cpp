// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/corpus/synthetic.hpp"

#include "cannedbot/error.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace cannedbot::corpus {

namespace {

using numerics::Rng;

struct Action {
  const char* name;
  const char* agent;
  std::array<const char*, 2> paraphrases;
  std::array<const char*, 4> customer;
};

struct Object {
  const char* name;
  bool sensitive;
};

// Agent wording shares the action verb and the object noun with the customer
// request, so an unseen action x object template is composed of known words.
constexpr std::array<Action, 8> kActions = {{
    {"reset", "I can reset your {o} for you right now",
     {"Let me reset your {o} for you", "I am resetting your {o} now"},
     {"i need to reset my {o}", "can you reset my {o}", "my {o} needs to be reset",
      "help me reset my {o}"}},
    {"cancel", "I have cancelled your {o} as you requested",
     {"Your {o} has now been cancelled", "I went ahead and cancelled your {o}"},
     {"please cancel my {o}", "i want to cancel my {o}", "can you cancel my {o} today",
      "i would like my {o} cancelled"}},
    {"update", "I can update the details on your {o} now",
     {"Let me update the details on your {o}", "I will change the details on your {o} now"},
     {"i need to update my {o} details", "can you update the details on my {o}",
      "the details on my {o} are out of date", "i want to update my {o}"}},
    {"status", "Let me check the status of your {o}",
     {"I am checking the status of your {o} now", "One moment while i check on your {o}"},
     {"what is the status of my {o}", "can you check on my {o}",
      "i want to know the status of my {o}", "is my {o} ok"}},
    {"replace", "I will send you a new {o} within 5 days",
     {"A new {o} is on its way and should arrive in 5 days",
      "I have ordered a replacement {o} for you"},
     {"my {o} is broken", "i need a new {o}", "can you send me a new {o}",
      "my {o} stopped working"}},
    {"refund", "I have refunded the charge on your {o}",
     {"The charge on your {o} has been refunded", "I have issued a refund for your {o}"},
     {"i was charged twice for my {o}", "i want a refund for my {o}",
      "there is a wrong charge on my {o}", "please refund my {o}"}},
    {"activate", "Your {o} is now active and ready to use",
     {"I have activated your {o} for you", "Your {o} has been activated"},
     {"how do i activate my {o}", "my {o} is not active yet", "please activate my {o}",
      "i cannot activate my {o}"}},
    {"fee", "The monthly fee for your {o} is 15 dollars",
     {"Your {o} costs 15 dollars per month", "You pay 15 dollars a month for your {o}"},
     {"how much is the fee for my {o}", "what do i pay for my {o}",
      "why is my {o} so expensive", "what is the monthly fee on my {o}"}},
}};

constexpr std::array<Object, 8> kObjects = {{
    {"card", false},
    {"account", true},
    {"password", true},
    {"plan", false},
    {"order", false},
    {"subscription", false},
    {"pin", true},
    {"router", false},
}};

struct Scaffold {
  const char* name;
  const char* agent;
  std::array<const char*, 2> paraphrases;
};

constexpr std::array<Scaffold, 4> kScaffold = {{
    {"greeting", "Hi thanks for contacting support how can i help you today",
     {"Hello thanks for getting in touch how can i help", "Hi there what can i do for you today"}},
    {"verify", "For security can you please confirm your date of birth",
     {"Before i continue can you confirm your date of birth",
      "Can you please verify your date of birth for me"}},
    {"closing", "Is there anything else i can help you with today",
     {"Anything else i can do for you", "Can i help you with anything else today"}},
    {"goodbye", "Thanks for chatting with us have a great day",
     {"Thank you for contacting us goodbye", "Have a lovely day and thanks for chatting"}},
}};

constexpr std::array<const char*, 5> kOpeners = {"hi ", "hello ", "hey there ", "good morning ", ""};
constexpr std::array<const char*, 4> kConnectors = {"also ", "one more thing ", "and ", "thanks also "};
constexpr std::array<const char*, 3> kReopeners = {"yes ", "yes actually ", "actually yes "};
constexpr std::array<const char*, 6> kSuffixes = {"", " please", " thanks", " my account number is #",
                                                  " its urgent", " asap"};
constexpr std::array<const char*, 4> kThanks = {"thank you", "great thanks", "ok thanks a lot",
                                                "perfect thank you"};
constexpr std::array<const char*, 4> kDone = {"no thats all", "nope thats everything",
                                              "no thank you bye", "that is all for today"};
constexpr std::array<const char*, 4> kBirthDates = {"sure its #/#/#", "it is # march #",
                                                    "my date of birth is #/#/#", "ok #/#/#"};
constexpr std::array<const char*, 4> kFillers = {"Sure ", "Ok ", "No problem ", "Of course "};

std::string substitute(std::string_view pattern, std::string_view object) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern.substr(i, 3) == "{o}") {
      out += object;
      i += 3;
    } else {
      out.push_back(pattern[i++]);
    }
  }
  return out;
}

template <std::size_t N>
const char* pick(const std::array<const char*, N>& options, Rng& rng) {
  return options[rng.index(N)];
}

std::string fill_digits(std::string_view pattern, Rng& rng) {
  std::string out;
  for (char c : pattern) {
    if (c != '#') {
      out.push_back(c);
      continue;
    }
    const std::size_t n = 2 + rng.index(7);
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>('0' + rng.index(10)));
  }
  return out;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

std::string drop_word(const std::string& text, Rng& rng) {
  auto words = split_words(text);
  if (words.size() < 4) return text;
  words.erase(words.begin() + static_cast<std::ptrdiff_t>(rng.index(words.size())));
  return join_words(words);
}

std::string typo(const std::string& text, Rng& rng) {
  auto words = split_words(text);
  std::vector<std::size_t> long_words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].size() >= 4) long_words.push_back(i);
  }
  if (long_words.empty()) return text;
  std::string& w = words[long_words[rng.index(long_words.size())]];
  const std::size_t pos = rng.index(w.size() - 1);
  std::swap(w[pos], w[pos + 1]);
  return join_words(words);
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

class DialogueWriter {
 public:
  DialogueWriter(const std::vector<SyntheticIntent>& intents, double noise, Rng& rng)
      : intents_(intents), noise_(noise), rng_(rng) {}

  void agent(int intent) {
    const SyntheticIntent& info = intents_[static_cast<std::size_t>(intent)];
    std::string text = info.template_text;
    if (noise_ > 0.0 && rng_.bernoulli(noise_)) {
      switch (rng_.index(4)) {
        case 0: text = info.paraphrases[rng_.index(info.paraphrases.size())]; break;
        case 1: text = std::string(pick(kFillers, rng_)) + lower_first(text); break;
        case 2: text = drop_word(text, rng_); break;
        default: text = typo(text, rng_); break;
      }
    }
    d_.utterances.push_back({Speaker::kAgent, std::move(text), {}, intent});
  }

  void customer(std::string text) {
    if (noise_ > 0.0 && rng_.bernoulli(noise_)) {
      text = rng_.bernoulli(0.5) ? typo(text, rng_) : drop_word(text, rng_);
    }
    d_.utterances.push_back({Speaker::kCustomer, std::move(text), {}, std::nullopt});
  }

  Dialogue finish(std::string id) {
    d_.id = std::move(id);
    return std::move(d_);
  }

 private:
  const std::vector<SyntheticIntent>& intents_;
  double noise_;
  Rng& rng_;
  Dialogue d_;
};

int topic_action(int topic_index) { return topic_index % 8; }
int topic_object(int topic_index) { return (topic_index + topic_index / 8) % 8; }

}  // namespace

std::vector<SyntheticIntent> synthetic_intents(int n_intents) {
  if (n_intents <= kFirstTopicIntent || n_intents > kMaxSyntheticIntents) {
    throw Error(ErrorCode::kInvalidSpec,
                "n_intents must be in [" + std::to_string(kFirstTopicIntent + 1) + ", " +
                    std::to_string(kMaxSyntheticIntents) + "], got " + std::to_string(n_intents));
  }
  std::vector<SyntheticIntent> intents;
  for (int i = 0; i < kFirstTopicIntent; ++i) {
    const Scaffold& s = kScaffold[static_cast<std::size_t>(i)];
    intents.push_back({i, s.name, s.agent, {s.paraphrases.begin(), s.paraphrases.end()}, false});
  }
  for (int id = kFirstTopicIntent; id < n_intents; ++id) {
    const int t = id - kFirstTopicIntent;
    const Action& a = kActions[static_cast<std::size_t>(topic_action(t))];
    const Object& o = kObjects[static_cast<std::size_t>(topic_object(t))];
    SyntheticIntent intent;
    intent.id = id;
    intent.name = std::string(a.name) + "_" + o.name;
    intent.template_text = substitute(a.agent, o.name);
    for (const char* p : a.paraphrases) intent.paraphrases.push_back(substitute(p, o.name));
    intent.topic = true;
    intents.push_back(std::move(intent));
  }
  return intents;
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.n_intents <= 0) throw Error(ErrorCode::kInvalidSpec, "n_intents must be positive");
  if (spec.n_dialogues <= 0) throw Error(ErrorCode::kInvalidSpec, "n_dialogues must be positive");
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "noise must be in [0, 1]");
  }
  if (spec.max_topics_per_dialogue < 1) {
    throw Error(ErrorCode::kInvalidSpec, "max_topics_per_dialogue must be >= 1");
  }
  SyntheticCorpus out;
  out.intents = synthetic_intents(spec.n_intents);
  const int n_topics = spec.n_intents - kFirstTopicIntent;

  Rng rng(spec.seed);
  for (int n = 0; n < spec.n_dialogues; ++n) {
    DialogueWriter w(out.intents, spec.noise, rng);
    w.agent(kGreetingIntent);
    const std::size_t topics = 1 + rng.index(static_cast<std::size_t>(spec.max_topics_per_dialogue));
    bool verified = false;
    std::string lead = pick(kOpeners, rng);
    for (std::size_t e = 0; e < topics; ++e) {
      const int t = static_cast<int>(rng.index(static_cast<std::size_t>(n_topics)));
      const Action& a = kActions[static_cast<std::size_t>(topic_action(t))];
      const Object& o = kObjects[static_cast<std::size_t>(topic_object(t))];
      w.customer(lead + substitute(pick(a.customer, rng), o.name) +
                 fill_digits(pick(kSuffixes, rng), rng));
      if (o.sensitive && !verified) {
        w.agent(kVerifyIntent);
        w.customer(fill_digits(pick(kBirthDates, rng), rng));
        verified = true;
      }
      w.agent(kFirstTopicIntent + t);
      if (e + 1 == topics) break;
      if (rng.bernoulli(0.5)) {
        w.customer(pick(kThanks, rng));
        w.agent(kClosingIntent);
        lead = pick(kReopeners, rng);
      } else {
        lead = pick(kConnectors, rng);
      }
    }
    w.customer(pick(kThanks, rng));
    w.agent(kClosingIntent);
    w.customer(pick(kDone, rng));
    w.agent(kGoodbyeIntent);
    char id[32];
    std::snprintf(id, sizeof(id), "syn-%06d", n);
    out.dialogues.push_back(w.finish(id));
  }
  out.stats = compute_stats(out.dialogues);
  return out;
}

namespace {

bool has_intent(const Dialogue& d, int intent) {
  for (const Utterance& u : d.utterances) {
    if (u.speaker == Speaker::kAgent && u.intent == intent) return true;
  }
  return false;
}

}  // namespace

std::vector<Dialogue> without_intent(const std::vector<Dialogue>& dialogues, int intent) {
  std::vector<Dialogue> out;
  for (const Dialogue& d : dialogues) {
    if (!has_intent(d, intent)) out.push_back(d);
  }
  return out;
}

std::vector<Dialogue> with_intent(const std::vector<Dialogue>& dialogues, int intent) {
  std::vector<Dialogue> out;
  for (const Dialogue& d : dialogues) {
    if (has_intent(d, intent)) out.push_back(d);
  }
  return out;
}

}  // namespace cannedbot::corpus
