#include <gtest/gtest.h>

#include "groundwork/error.hpp"
#include "groundwork/history.hpp"
#include "groundwork/page_model.hpp"
#include "support.hpp"

using namespace groundwork;
using gwtest::fixture;

TEST(PageModel, RenderFullIsIndentedPreorder) {
    const auto snap = load_snapshot(fixture("ax/submit_after.json"));
    EXPECT_EQ(render_full(snap),
              "[1] WebArea 'Order'\n"
              "  [10] heading 'Order details'\n"
              "  [11] textbox 'Quantity' 1\n"
              "  [12] checkbox 'Gift wrap'\n"
              "  [42] button 'Submit'\n");
}

TEST(PageModel, ViewportKeepsAncestorsOfVisibleNodes) {
    const auto snap = load_snapshot(fixture("ax/long_page.json"));
    const auto view = render_viewport(snap);
    // rows at y = 120 + 80 i intersect [0, 720) for i <= 7
    EXPECT_NE(view.find("[107] listitem 'Article 8'"), std::string::npos);
    EXPECT_EQ(view.find("[108] listitem"), std::string::npos);
    EXPECT_NE(view.find("[3] list 'Articles'"), std::string::npos);
    EXPECT_EQ(offscreen_count(snap), 22u);
    EXPECT_NE(view.find("(+22 elements off-screen)"), std::string::npos);
    EXPECT_LT(token_count(view), token_count(render_full(snap)));
}

TEST(PageModel, ScrollingMovesTheWindow) {
    auto snap = load_snapshot(fixture("ax/long_page.json"));
    snap.viewport.scroll_y = 1600;
    const auto view = render_viewport(snap);
    EXPECT_EQ(view.find("[100] listitem"), std::string::npos);
    EXPECT_NE(view.find("[125] listitem 'Article 26'"), std::string::npos);
}

TEST(PageModel, EdgeTouchingBoxIsNotVisible) {
    Viewport vp;  // 1280x720 at origin
    EXPECT_FALSE(intersects({0, 720, 10, 10}, vp));
    EXPECT_TRUE(intersects({0, 719, 10, 10}, vp));
    EXPECT_FALSE(intersects({-10, 0, 10, 10}, vp));
}

TEST(PageModel, ValidateRejectsDuplicateIds) {
    auto snap = load_snapshot(fixture("ax/submit_after.json"));
    snap.root.children.back().id = 10;
    try {
        validate(snap);
        FAIL() << "expected DuplicateId";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::duplicate_id);
    }
}

TEST(PageModel, ValidateRejectsNegativeExtent) {
    auto snap = load_snapshot(fixture("ax/submit_after.json"));
    snap.root.children[0].bbox.width = -1;
    EXPECT_THROW(validate(snap), Error);
}

TEST(PageModel, DigestIgnoresSeqButNotContent) {
    auto a = load_snapshot(fixture("ax/submit_after.json"));
    auto b = a;
    b.seq += 10;
    EXPECT_EQ(snapshot_digest(a), snapshot_digest(b));
    b.root.children[1].text = "2";
    EXPECT_NE(snapshot_digest(a), snapshot_digest(b));
}

TEST(PageModel, JsonRoundTrip) {
    gwtest::TreeGen gen(3);
    for (int i = 0; i < 50; ++i) {
        const auto s = gen.snapshot(1 + gen.pick(50));
        EXPECT_EQ(nlohmann::json(s).get<AXSnapshot>(), s);
    }
}

TEST(PageModel, NodeCount) {
    const auto snap = load_snapshot(fixture("ax/long_page.json"));
    EXPECT_EQ(node_count(snap.root), 33u);
}
