#include <gtest/gtest.h>

#include "groundwork/diff_engine.hpp"
#include "groundwork/error.hpp"
#include "groundwork/sim_env.hpp"
#include "support.hpp"

using namespace groundwork;

namespace {

const sim::Catalog& catalog() {
    static const sim::Catalog c = sim::Catalog::load((gwtest::source_dir() / "sites").string(),
                                                     (gwtest::source_dir() / "tasks").string());
    return c;
}

std::string answer_of(const sim::TaskSpec& t) {
    for (const auto& a : t.solution) {
        if (a.kind == ActionKind::answer) return a.argument;
    }
    return {};
}

}  // namespace

TEST(SimEnv, CatalogCoversSixCategories) {
    std::map<std::string, int> per;
    for (const auto& t : catalog().tasks()) ++per[t.category];
    EXPECT_EQ(per.size(), 6u);
    for (const auto& cat : sim::task_categories()) {
        EXPECT_GE(per[cat], 3) << cat;
        EXPECT_LE(per[cat], 6) << cat;
    }
}

// Every shipped solution completes its task.
TEST(SimEnv, EverySolutionSucceeds) {
    for (const auto& t : catalog().tasks()) {
        auto s = catalog().open(t);
        for (const auto& a : t.solution) {
            if (is_environment_action(a.kind)) s->step(a);
        }
        EXPECT_TRUE(s->check_success(t, answer_of(t))) << t.task_id;
        if (t.needs_answer()) {
            EXPECT_FALSE(s->check_success(t, "wrong")) << t.task_id;
        } else {
            EXPECT_TRUE(s->goal_reached()) << t.task_id;
        }
    }
}

TEST(SimEnv, CatalogOrderReachesConfirmation) {
    const auto* t = catalog().task("catalog_order_01");
    ASSERT_NE(t, nullptr);
    auto s = catalog().open(*t);
    EXPECT_EQ(s->current_page(), "home");
    for (const auto& a : t->solution) {
        if (is_environment_action(a.kind)) s->step(a);
    }
    EXPECT_EQ(s->current_page(), "confirmation");
    EXPECT_NE(render_full(s->observe()).find("REQ0010001"), std::string::npos);
    EXPECT_TRUE(s->check_success(*t, "The request number is REQ0010001."));
}

TEST(SimEnv, UnknownElement) {
    auto s = catalog().open(*catalog().task("catalog_order_01"));
    try {
        s->step(Action::click(999));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unknown_element);
    }
}

TEST(SimEnv, UnmatchedActionIsNoOpWithFreshSeq) {
    auto s = catalog().open(*catalog().task("catalog_order_01"));
    const auto before = s->observe();
    const auto r = s->step(Action::click(1));
    EXPECT_EQ(r.result_note, "no-op: no matching transition");
    EXPECT_GT(r.snapshot.seq, before.seq);
    EXPECT_TRUE(structurally_equal(before, r.snapshot));
}

TEST(SimEnv, ScrollIntoBringsTargetIntoView) {
    const auto* t = catalog().task("catalog_order_01");
    auto s = catalog().open(*t);
    for (auto a : {Action::click(2), Action::click(12), Action::click(22)}) s->step(a);
    EXPECT_EQ(render_viewport(s->observe()).find("[39] button"), std::string::npos);
    const auto r = s->step(Action::scroll_into(39));
    EXPECT_NE(render_viewport(r.snapshot).find("[39] button"), std::string::npos);
}

TEST(SimEnv, NonEnvironmentActionRejected) {
    auto s = catalog().open(*catalog().task("catalog_order_01"));
    EXPECT_THROW(s->step(Action::answer("x")), Error);
}

// Identical action sequences give byte-identical renderings.
TEST(SimEnvProperty, Deterministic) {
    for (const auto& t : catalog().tasks()) {
        auto a = catalog().open(t);
        auto b = catalog().open(t);
        for (const auto& act : t.solution) {
            if (!is_environment_action(act.kind)) continue;
            const auto ra = a->step(act);
            const auto rb = b->step(act);
            ASSERT_EQ(render_full(ra.snapshot), render_full(rb.snapshot));
            ASSERT_EQ(ra.snapshot, rb.snapshot);
            ASSERT_EQ(ra.result_note, rb.result_note);
        }
    }
}

// Sessions share the site definition but never each other's state.
TEST(SimEnvProperty, SessionsAreIndependent) {
    const auto* t = catalog().task("catalog_order_01");
    auto a = catalog().open(*t);
    const auto pristine = render_full(catalog().open(*t)->observe());
    a->step(Action::click(2));
    EXPECT_EQ(render_full(catalog().open(*t)->observe()), pristine);
}

TEST(SimEnv, ValidateRejectsDanglingTransition) {
    auto site = *catalog().site("service-catalog");
    site.transitions.push_back({"home", ActionKind::click, 4242, std::nullopt, {}});
    EXPECT_THROW(sim::validate(site), Error);
}
