#include "teval/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "teval/error.hpp"
#include "teval/rng.hpp"

namespace teval {

namespace {

struct FocalContext {
    const char* name;
    const char* source;
    const char* docstring;
};

constexpr FocalContext kFocals[] = {
    {"computeTotal",
     "int computeTotal() { int sum = 0; for (Item i : items) sum += i.price(); return sum; }",
     "Computes the total price of all items in the cart."},
    {"applyDiscount",
     "void applyDiscount(Discount d) { this.rate = d.rate(); recalc(); }",
     "Applies a discount to the running order."},
    {"mergeEntries",
     "void mergeEntries(Registry other) { entries.addAll(other.entries); }",
     "Merges the entries of another registry into this one."},
    {"formatLabel",
     "String formatLabel() { return prefix + \"-\" + suffix; }",
     "Formats the display label of this element."},
};

constexpr const char* kCodeLines[] = {
    "Cart cart = new Cart();",
    "cart.add(new Item(2));",
    "cart.add(new Item(5));",
    "Label label = Label.of(\"x\");",
    "Discount d = Discount.flat(3);",
    "Entry e1 = Entry.parse(\"a=1\");",
    "Entry e2 = Entry.parse(\"b=2\");",
    "Registry registry = Registry.shared();",
    "registry.register(e1);",
    "int total = cart.total();",
    "String text = label.render();",
    "double rate = d.rate();",
};

struct CommonException {
    const char* qualified;
    const char* simple;
    const char* messages[3];
};

constexpr CommonException kCommonExceptions[] = {
    {"org.opentest4j.AssertionFailedError", "AssertionFailedError",
     {"expected: <1> but was: <2>", "expected: <true> but was: <false>",
      "expected: <0> but was: <-1>"}},
    {"java.lang.NullPointerException", "NullPointerException",
     {"item is null", "label was null", "entries must not be null"}},
    {"java.lang.IllegalArgumentException", "IllegalArgumentException",
     {"rate out of range", "negative quantity", "empty label"}},
};

constexpr const char* kOracleTexts[] = {
    "assertEquals(7, total);",
    "assertTrue(rate > 0);",
    "assertNotNull(text);",
};

constexpr const char* kRareExceptions[][2] = {
    {"java.util.ConcurrentModificationException", "ConcurrentModificationException"},
    {"java.lang.StackOverflowError", "StackOverflowError"},
    {"java.nio.BufferOverflowException", "BufferOverflowException"},
    {"java.util.EmptyStackException", "EmptyStackException"},
    {"java.lang.NegativeArraySizeException", "NegativeArraySizeException"},
};

std::string trace_for(const std::string& record_id, const std::string& qualified,
                      const std::string& message, std::mt19937_64& gen) {
    std::string trace = "SyntheticTest." + record_id + "\n" + qualified;
    if (!message.empty()) trace += ": " + message;
    trace += "\n\tat shop.Core.run(Core.java:" + std::to_string(rng::int_in(gen, 10, 400)) + ")";
    trace += "\n\tat SyntheticTest." + record_id + "(SyntheticTest.java:" +
             std::to_string(rng::int_in(gen, 5, 90)) + ")";
    return trace;
}

CorpusEntry make_false_positive(const std::string& record_id, const std::string& bug_id,
                                int run_id, std::mt19937_64& gen) {
    CorpusEntry entry;
    TestRecord& r = entry.record;
    r.record_id = record_id;
    r.bug_id = bug_id;
    r.run_id = run_id;

    const FocalContext& focal = kFocals[rng::index(gen, std::size(kFocals))];
    r.focal_method_name = focal.name;
    r.focal_method_source = focal.source;
    r.focal_docstring = focal.docstring;

    const int line_count = rng::int_in(gen, 3, 5);
    const auto picks = rng::sample_indices(gen, std::size(kCodeLines),
                                           static_cast<std::size_t>(line_count));
    std::string prefix;
    for (std::size_t p : picks) {
        if (!prefix.empty()) prefix += "\n";
        prefix += kCodeLines[p];
    }
    r.prefix_source = prefix;

    if (rng::unit(gen) < 0.5) {
        r.oracle_kind = OracleKind::Assertion;
        r.oracle_text = kOracleTexts[rng::index(gen, std::size(kOracleTexts))];
    } else {
        r.oracle_kind = OracleKind::ExpectNoException;
    }

    // AssertionFailedError on roughly half the failures, the two common
    // runtime exceptions splitting the rest.
    const double roll = rng::unit(gen);
    const CommonException& exc =
        kCommonExceptions[roll < 0.5 ? 0 : (roll < 0.75 ? 1 : 2)];
    const std::string message = exc.messages[rng::index(gen, 3)];

    ExecutionOutcome& o = entry.outcome;
    o.record_id = record_id;
    o.buggy_result = RunResult::Fail;
    o.fixed_result = RunResult::Fail;
    o.raw_trace = trace_for(record_id, exc.qualified, message, gen);
    const FailureKind kind = exc.simple == std::string("AssertionFailedError")
                                 ? FailureKind::Assertion
                                 : FailureKind::Exception;
    o.buggy_failure_kind = kind;
    o.fixed_failure_kind = kind;
    return entry;
}

CorpusEntry make_true_positive(const std::string& record_id, const std::string& bug_id,
                               int run_id, int bug, int ordinal, std::size_t rare_index,
                               std::mt19937_64& gen) {
    CorpusEntry entry;
    TestRecord& r = entry.record;
    r.record_id = record_id;
    r.bug_id = bug_id;
    r.run_id = run_id;

    const std::string tag = std::to_string(bug) + "x" + std::to_string(ordinal);
    r.focal_method_name = "replayJournal" + tag;
    r.focal_method_source =
        "void replayJournal" + tag + "() { journal.replay(snapshot); ledger.commit(); }";
    r.focal_docstring =
        "Replays the journal against the captured snapshot and commits the ledger.";

    r.prefix_source = "Ledger ledger" + tag + " = Ledger.open(" + std::to_string(bug) + ");\n" +
                      "Snapshot snapshot" + tag + " = Snapshot.capture(ledger" + tag + ");\n" +
                      "Journal journal" + tag + " = ledger" + tag + ".journal();\n" +
                      "try { journal" + tag + ".replay(snapshot" + tag +
                      "); } catch (IllegalStateException e" + tag + ") { }";
    r.oracle_kind = OracleKind::ExpectException;

    const auto& rare = kRareExceptions[rare_index];
    const std::string message =
        "state " + tag + " corrupted at offset " + std::to_string(rng::int_in(gen, 100, 9999));

    ExecutionOutcome& o = entry.outcome;
    o.record_id = record_id;
    o.buggy_result = RunResult::Fail;
    o.fixed_result = RunResult::Pass;
    o.raw_trace = trace_for(record_id, rare[0], message, gen);
    o.buggy_failure_kind = FailureKind::Exception;
    o.fixed_failure_kind = FailureKind::None;
    return entry;
}

}  // namespace

Corpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.bugs < 0 || spec.failed_per_bug < 0 || spec.tp_min < 0 || spec.runs < 1) {
        throw DataError("synthetic spec: counts must be non-negative and runs at least 1");
    }
    if (spec.tp_min > spec.tp_max) {
        throw DataError("synthetic spec: tp_min exceeds tp_max");
    }
    if (spec.tp_max > spec.failed_per_bug) {
        throw DataError("synthetic spec: more planted TPs than failed tests per bug");
    }

    std::mt19937_64 gen(seed);
    Corpus corpus;
    corpus.reserve(static_cast<std::size_t>(spec.bugs) *
                   static_cast<std::size_t>(spec.runs) *
                   static_cast<std::size_t>(spec.failed_per_bug));

    for (int bug = 0; bug < spec.bugs; ++bug) {
        const std::string bug_id = "Bug-" + std::to_string(bug + 1);
        for (int run = 0; run < spec.runs; ++run) {
            const int tp_count = rng::int_in(gen, spec.tp_min, spec.tp_max);

            std::vector<int> positions(static_cast<std::size_t>(spec.failed_per_bug));
            for (int i = 0; i < spec.failed_per_bug; ++i) positions[static_cast<std::size_t>(i)] = i;
            rng::shuffle(gen, positions);
            std::vector<int> tp_ordinal(static_cast<std::size_t>(spec.failed_per_bug), -1);
            for (int j = 0; j < tp_count; ++j) tp_ordinal[static_cast<std::size_t>(positions[static_cast<std::size_t>(j)])] = j;

            const auto rare_picks = rng::sample_indices(gen, std::size(kRareExceptions),
                                                        std::min<std::size_t>(
                                                            std::size(kRareExceptions),
                                                            static_cast<std::size_t>(tp_count)));

            for (int i = 0; i < spec.failed_per_bug; ++i) {
                const std::string record_id = "Bug-" + std::to_string(bug + 1) + "-r" +
                                              std::to_string(run) + "-t" + std::to_string(i);
                const int ordinal = tp_ordinal[static_cast<std::size_t>(i)];
                if (ordinal >= 0) {
                    const std::size_t rare =
                        rare_picks[static_cast<std::size_t>(ordinal) % rare_picks.size()];
                    corpus.push_back(make_true_positive(record_id, bug_id, run, bug + 1,
                                                        ordinal + 1, rare, gen));
                } else {
                    corpus.push_back(make_false_positive(record_id, bug_id, run, gen));
                }
            }
        }
    }
    return corpus;
}

void write_truth_file(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& entry : corpus) {
        const bool is_tp = entry.outcome.buggy_result == RunResult::Fail &&
                           entry.outcome.fixed_result == RunResult::Pass &&
                           !entry.outcome.compile_error;
        out << entry.record.record_id << "\t" << (is_tp ? 1 : 0) << "\n";
    }
}

}  // namespace teval
