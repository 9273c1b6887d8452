// Generates the bundled desk-scale corpus:
//   headlines.csv  2,000 dated binary headlines (date,text,score)
//   ratings.csv    1,000 ordinal headlines (text,rating)
//   holdout.csv    200 dated binary headlines, 100 per class, no label noise
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

using Rng = std::mt19937_64;

const std::vector<std::string> kPositive = {
    "rescued",    "celebrates",  "triumph",    "heroes",      "recovery",   "kindness",   "donates",
    "reunited",   "breakthrough", "thrives",   "wins",        "saves",      "cure",       "hope",
    "joy",        "inspiring",   "record harvest", "restored", "volunteers help", "award",  "generous",
    "smiles",     "celebration", "success",    "heartwarming", "adopted",   "healed",     "growth",
    "welcomes",   "honoured",    "milestone",  "gift",        "uplifting",  "champion",   "revival",
    "blooms",     "rebuilds",    "graduates",  "peace deal",  "surplus"};

const std::vector<std::string> kNegative = {
    "killed",  "crash",     "fires rage", "flood",     "scandal",   "collapse",  "murdered",  "outbreak",
    "war",     "deaths",    "injured",    "arrested",  "fraud",     "drought",   "layoffs",   "attack",
    "crisis",  "shooting",  "recession",  "toxic",     "destroyed", "victims",   "lockdown",  "protest turns violent",
    "stabbed", "missing",   "bankrupt",   "corruption", "evacuated", "storm damage", "overdose", "riot",
    "famine",  "plunges",   "fatal",      "abuse",     "tragedy",   "hostage",   "closure",   "panic"};

const std::vector<std::string> kSubjects = {
    "Local council", "Sydney family", "Melbourne school", "Rural town", "Hospital staff", "Farmers",
    "Students",      "Firefighters",  "Scientists",       "Queensland community", "City workers",
    "Coastal village", "Teenager",    "Grandmother",      "Small business", "Police", "Researchers",
    "Nurses",        "Rescue crew",   "Footy club",       "Charity",  "Residents", "Tasmanian couple",
    "Airline",       "Zoo keepers"};

const std::vector<std::string> kPlaces = {
    "in NSW",          "after weekend",     "near Brisbane", "in Perth",     "across Victoria",
    "this week",       "on the coast",      "in Adelaide",   "after months", "in regional areas",
    "overnight",       "in Darwin",         "near Canberra", "at the show",  "in the outback"};

const std::vector<std::string> kFiller = {
    "report", "says", "amid", "latest", "update", "officials", "today", "new", "local", "plan",
    "season", "figures", "data", "residents", "community", "council", "state", "year", "news", "week"};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(double p, Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

// `pos` / `neg` sentiment phrases in random positions among neutral words.
std::string headline(int pos, int neg, Rng& rng) {
  std::vector<std::string> words;
  for (int i = 0; i < pos; ++i) words.push_back(pick(kPositive, rng));
  for (int i = 0; i < neg; ++i) words.push_back(pick(kNegative, rng));
  const int fillers = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < fillers; ++i) words.push_back(pick(kFiller, rng));
  std::shuffle(words.begin(), words.end(), rng);
  std::string out = pick(kSubjects, rng);
  for (const auto& w : words) out += " " + w;
  if (chance(0.7, rng)) out += " " + pick(kPlaces, rng);
  return out;
}

// Positive headlines carry 1-2 positive phrases and, 15% of the time, one
// negative distractor; negatives mirror that.
std::string binary_headline(int label, Rng& rng) {
  const int main = std::uniform_int_distribution<int>(1, 2)(rng);
  const int other = chance(0.15, rng) ? 1 : 0;
  return label == 1 ? headline(main, other, rng) : headline(other, main, rng);
}

std::string random_date(Rng& rng) {
  // 2019-09-01 .. 2020-12-31
  static const std::array<std::pair<int, int>, 16> months = {{{2019, 9}, {2019, 10}, {2019, 11}, {2019, 12},
                                                              {2020, 1}, {2020, 2},  {2020, 3},  {2020, 4},
                                                              {2020, 5}, {2020, 6},  {2020, 7},  {2020, 8},
                                                              {2020, 9}, {2020, 10}, {2020, 11}, {2020, 12}}};
  static const std::array<int, 13> days = {0, 31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const auto& [y, m] = months[std::uniform_int_distribution<std::size_t>(0, months.size() - 1)(rng)];
  const int last = (m == 2 && y % 4 != 0) ? 28 : days[static_cast<std::size_t>(m)];
  const int d = std::uniform_int_distribution<int>(1, last)(rng);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::string score_for(int label, Rng& rng) {
  const double mag = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", label == 1 ? mag : -mag);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the desk-scale headline corpus"};
  std::string out_dir = "corpus";
  std::uint64_t seed = 20201231;
  std::size_t n_binary = 2000, n_ordinal = 1000, n_holdout = 200;
  double positive_share = 0.4, label_noise = 0.05;
  app.add_option("out", out_dir, "Output directory");
  app.add_option("--seed", seed);
  app.add_option("--binary", n_binary);
  app.add_option("--ordinal", n_ordinal);
  app.add_option("--holdout", n_holdout);
  app.add_option("--positive-share", positive_share)->check(CLI::Range(0.0, 1.0));
  app.add_option("--label-noise", label_noise)->check(CLI::Range(0.0, 0.5));
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  Rng rng(seed);

  {
    std::ofstream f(std::filesystem::path(out_dir) / "headlines.csv");
    f << "date,text,score\n";
    for (std::size_t i = 0; i < n_binary; ++i) {
      const int label = chance(positive_share, rng) ? 1 : 0;
      const auto text = binary_headline(label, rng);
      const int observed = chance(label_noise, rng) ? 1 - label : label;
      f << random_date(rng) << "," << csv_field(text) << "," << score_for(observed, rng) << "\n";
    }
  }

  {
    std::ofstream f(std::filesystem::path(out_dir) / "ratings.csv");
    f << "text,rating\n";
    for (std::size_t i = 0; i < n_ordinal; ++i) {
      const int rating = std::uniform_int_distribution<int>(1, 5)(rng);
      std::string text;
      switch (rating) {
        case 1: text = headline(0, 2, rng); break;
        case 2: text = headline(chance(0.3, rng) ? 1 : 0, 1 + (chance(0.3, rng) ? 1 : 0), rng); break;
        case 3: text = chance(0.5, rng) ? headline(0, 0, rng) : headline(1, 1, rng); break;
        case 4: text = headline(1 + (chance(0.3, rng) ? 1 : 0), chance(0.3, rng) ? 1 : 0, rng); break;
        default: text = headline(2, 0, rng); break;
      }
      int observed = rating;
      if (chance(label_noise, rng)) observed = std::clamp(rating + (chance(0.5, rng) ? 1 : -1), 1, 5);
      f << csv_field(text) << "," << observed << "\n";
    }
  }

  {
    Rng hold(seed ^ 0x5eedULL);
    std::ofstream f(std::filesystem::path(out_dir) / "holdout.csv");
    f << "date,text,score\n";
    for (std::size_t i = 0; i < n_holdout; ++i) {
      const int label = i % 2 == 0 ? 1 : 0;
      f << random_date(hold) << "," << csv_field(binary_headline(label, hold)) << "," << score_for(label, hold)
        << "\n";
    }
  }

  std::cout << "wrote " << n_binary << " binary, " << n_ordinal << " ordinal and " << n_holdout
            << " holdout rows to " << out_dir << " (seed " << seed << ")\n";
  return 0;
}
