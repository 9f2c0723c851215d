#include <doctest.h>

#include "commcp/comms.hpp"
#include "commcp/rng.hpp"

using namespace commcp;

namespace {

Request cushion_request() {
  Request r;
  r.from_agent = 0;
  r.question_id = "q0";
  r.targets = {{"bear cushion", {{"color", "red"}}}};
  return r;
}

}  // namespace

TEST_CASE("generate_message") {
  Request req = cushion_request();
  std::map<std::string, NamedPos> pos = {{"id_pillow", {"pillow", {4, 2}}},
                                         {"id_bed", {"bed", {1, 1}}},
                                         {"id_rp", {"red pillow", {2, 1}}}};

  SUBCASE("both sets empty -> no message") {
    CHECK(!generate_message({}, pos, req, 1).has_value());
  }
  SUBCASE("relevants only") {
    FilterResult f;
    f.relevants = {"id_pillow"};
    auto msg = generate_message(f, pos, req, 1);
    REQUIRE(msg.has_value());
    CHECK(msg->rendered == "I see pillow that may be relevant to your target red bear cushion");
    CHECK(msg->to_agent == 0);
    CHECK(msg->from_agent == 1);
    CHECK(msg->targets_seen.empty());
  }
  SUBCASE("both clauses") {
    FilterResult f;
    f.relevants = {"id_bed", "id_rp"};
    f.targets = {"id_rp"};
    auto msg = generate_message(f, pos, req, 1);
    REQUIRE(msg.has_value());
    CHECK(msg->rendered ==
          "I see bed, red pillow that may be relevant to your target red bear cushion, and "
          "red pillow may be your target at (2, 1)");
  }
  SUBCASE("targets only") {
    FilterResult f;
    f.targets = {"id_rp"};
    auto msg = generate_message(f, pos, req, 1);
    REQUIRE(msg.has_value());
    CHECK(msg->rendered == "red pillow may be your target at (2, 1)");
  }
}

TEST_CASE("rendered messages round-trip through the template grammar") {
  const std::vector<std::string> names = {"pillow",   "bed",     "red pillow", "dolls",
                                          "black chair", "basketboard", "kettle"};
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<NamedPos> relevants, targets;
    int nr = rng.next_int(0, 3);
    int nt = rng.next_int(0, 3);
    if (nr + nt == 0) nt = 1;
    for (int i = 0; i < nr; ++i)
      relevants.push_back({names[rng.next_below(names.size())],
                           {rng.next_int(0, 30), rng.next_int(0, 30)}});
    for (int i = 0; i < nt; ++i)
      targets.push_back({names[rng.next_below(names.size())],
                         {rng.next_int(0, 30), rng.next_int(0, 30)}});
    std::string target_text = "red bear cushion";

    std::string rendered = render_message(relevants, targets, target_text);
    CHECK(!rendered.empty());
    ParsedMessage parsed = parse_rendered_message(rendered);

    REQUIRE(parsed.relevant_names.size() == relevants.size());
    for (std::size_t i = 0; i < relevants.size(); ++i)
      CHECK(parsed.relevant_names[i] == relevants[i].name);
    if (!relevants.empty()) CHECK(parsed.target_text == target_text);
    REQUIRE(parsed.targets_seen.size() == targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      CHECK(parsed.targets_seen[i].name == targets[i].name);
      CHECK(parsed.targets_seen[i].position == targets[i].position);
    }
  }
}

TEST_CASE("bus service times") {
  SUBCASE("idle channel: one service period") {
    MessageBus bus({1.0}, 2);
    double d = bus.enqueue(0, 1, SolvedNotice{0, "q"}, 10.0);
    CHECK(d == doctest::Approx(11.0));
  }
  SUBCASE("rate 4: back-to-back at 0.25 and 0.5") {
    MessageBus bus({4.0}, 2);
    CHECK(bus.enqueue(0, 1, SolvedNotice{0, "q1"}, 0.0) == doctest::Approx(0.25));
    CHECK(bus.enqueue(0, 1, SolvedNotice{0, "q2"}, 0.0) == doctest::Approx(0.5));
  }
  SUBCASE("payload queued behind an in-flight send") {
    MessageBus bus({1.0}, 2);
    CHECK(bus.enqueue(0, 1, SolvedNotice{0, "q1"}, 5.0) == doctest::Approx(6.0));
    CHECK(bus.enqueue(0, 1, SolvedNotice{0, "q2"}, 5.5) == doctest::Approx(7.0));
  }
}

TEST_CASE("drain order and exactly-once delivery") {
  MessageBus bus({1.0}, 3);
  bus.enqueue(0, 2, SolvedNotice{0, "a"}, 0.0);   // delivery 1.0
  bus.enqueue(1, 2, SolvedNotice{1, "b"}, 0.0);   // delivery 1.0, later seq
  bus.enqueue(0, 2, SolvedNotice{0, "c"}, 0.0);   // delivery 2.0

  CHECK(bus.drain(2, 0.5).empty());
  auto due = bus.drain(2, 1.0);
  REQUIRE(due.size() == 2);
  CHECK(std::get<SolvedNotice>(due[0].body).question_id == "a");
  CHECK(std::get<SolvedNotice>(due[1].body).question_id == "b");

  auto later = bus.drain(2, 10.0);
  REQUIRE(later.size() == 1);
  CHECK(std::get<SolvedNotice>(later[0].body).question_id == "c");
  CHECK(bus.drain(2, 20.0).empty());
  CHECK(bus.in_flight() == 0);
}

TEST_CASE("per-sender FIFO holds under random traffic") {
  Rng rng(77);
  MessageBus bus({2.0}, 4);
  std::map<int, std::vector<std::string>> sent;  // per sender, to agent 0
  double t = 0.0;
  int counter = 0;
  for (int i = 0; i < 200; ++i) {
    t += rng.next_u01();
    int from = rng.next_int(1, 3);
    std::string id = "p" + std::to_string(counter++);
    bus.enqueue(from, 0, SolvedNotice{from, id}, t);
    sent[from].push_back(id);
  }
  auto all = bus.drain(0, 1e9);
  CHECK(all.size() == 200);
  std::map<int, std::size_t> cursor;
  double prev_time = -1.0;
  for (const auto& d : all) {
    CHECK(d.delivery_time >= prev_time);
    prev_time = d.delivery_time;
    const auto& notice = std::get<SolvedNotice>(d.body);
    CHECK(sent[d.from][cursor[d.from]++] == notice.question_id);
  }
}

TEST_CASE("broadcast fans out one copy per recipient at one service slot") {
  MessageBus bus({1.0}, 3);
  double d = bus.enqueue(0, -1, Request{0, "q0", {{"ball", {}}}}, 0.0);
  CHECK(d == doctest::Approx(1.0));
  // the next send is only one slot later: broadcasting cost one slot total
  CHECK(bus.enqueue(0, 1, SolvedNotice{0, "x"}, 0.0) == doctest::Approx(2.0));
  CHECK(bus.drain(1, 1.0).size() == 1);
  CHECK(bus.drain(2, 1.0).size() == 1);
  CHECK(bus.drain(0, 1.0).empty());
}
