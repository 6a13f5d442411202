#!/usr/bin/env python3
"""Writes the test fixtures under fixtures/ (snapshots, trajectory, PII corpus, scripted models)."""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
OUT = ROOT / "fixtures"


def node(id_, role, name="", text="", y=0, h=24, children=None, editable=False, focused=False):
    return {"id": id_, "role": role, "name": name, "text": text,
            "bbox": {"x": 16, "y": y, "width": 400, "height": h},
            "children": children or [], "editable": editable, "focused": focused}


def snapshot(url, title, root, seq=0):
    return {"url": url, "title": title, "root": root, "seq": seq,
            "viewport": {"scroll_x": 0, "scroll_y": 0, "width": 1280, "height": 720}}


def write_json(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1, ensure_ascii=False) + "\n")


def ax_fixtures():
    # The order form before and after pressing Continue: one button appears.
    form = [
        node(10, "heading", "Order details", y=80),
        node(11, "textbox", "Quantity", "1", y=140, editable=True),
        node(12, "checkbox", "Gift wrap", y=190),
    ]
    before = snapshot("https://shop.example/order", "Order", node(1, "WebArea", "Order", children=form, h=720), 4)
    after_children = form + [node(42, "button", "Submit", y=240)]
    after = snapshot("https://shop.example/order", "Order",
                     node(1, "WebArea", "Order", children=after_children, h=720), 5)
    write_json(OUT / "ax" / "submit_before.json", before)
    write_json(OUT / "ax" / "submit_after.json", after)

    # One pair that exercises every change template.
    b = snapshot("https://shop.example/cart", "Cart", node(1, "WebArea", "Cart", h=720, children=[
        node(2, "navigation", "Main", y=0, children=[
            node(3, "link", "Home", y=0),
            node(4, "link", "Deals", y=0),
        ]),
        node(5, "list", "Items", y=60, children=[
            node(6, "listitem", "Keyboard", "1 x 49.00", y=60),
            node(7, "listitem", "Mouse", "2 x 19.00", y=90),
        ]),
        node(8, "status", "", "Subtotal 87.00", y=140),
        node(9, "button", "Checkout", y=180),
        node(13, "textbox", "Coupon", y=220, editable=True),
        node(14, "button", "Remove all", y=260),
    ]), 7)
    a = snapshot("https://shop.example/cart?step=2", "Cart", node(1, "WebArea", "Cart", h=720, children=[
        node(2, "navigation", "Main", y=0, children=[
            node(4, "link", "Deals", y=0),
            node(3, "link", "Home", y=0),
        ]),
        node(5, "list", "Items", y=60, children=[
            node(6, "listitem", "Keyboard", "1 x 49.00", y=60),
            node(7, "listitem", "Mouse", "3 x 19.00", y=90),
        ]),
        node(8, "status", "", "Subtotal 106.00", y=140),
        node(9, "link", "Proceed to checkout", y=180),
        node(13, "textbox", "Coupon", y=220, editable=False, focused=True),
        node(15, "alert", "Cart updated", y=300),
    ]), 8)
    write_json(OUT / "ax" / "cart_before.json", b)
    write_json(OUT / "ax" / "cart_after.json", a)

    # A long page with most elements below the fold.
    rows = [node(100 + i, "listitem", f"Article {i + 1}", f"Summary of article {i + 1}", y=120 + 80 * i)
            for i in range(30)]
    long_page = snapshot("https://kb.example/articles", "Articles",
                         node(1, "WebArea", "Articles", h=2600, children=[
                             node(2, "heading", "Knowledge base", y=40),
                             node(3, "list", "Articles", y=120, h=2400, children=rows),
                         ]))
    write_json(OUT / "ax" / "long_page.json", long_page)


def render_full(root, depth=0, out=None):
    out = [] if out is None else out
    line = "  " * depth + f"[{root['id']}] {root['role']} '{root['name']}'"
    if root["text"]:
        line += " " + root["text"]
    out.append(line)
    for c in root["children"]:
        render_full(c, depth + 1, out)
    return out


def trajectory_fixture():
    # 20 steps through a ticket queue: each step edits a couple of rows.
    rng = random.Random(20)
    rows = [{"id": 100 + i, "name": f"INC{1000 + i}", "text": "open"} for i in range(24)]
    steps = []
    prev_rows = None
    actions = []
    for i in range(20):
        changes = []
        if prev_rows is not None:
            for _ in range(2):
                r = rows[rng.randrange(len(rows))]
                old = r["text"]
                r["text"] = rng.choice(["open", "in progress", "resolved", "closed"])
                if old != r["text"]:
                    changes.append(f"Text changed: [{r['id']}] listitem '{r['name']}': '{old}' -> '{r['text']}'")
        root = node(1, "WebArea", "Incidents", children=[
            node(2, "heading", "Incident queue"),
            node(3, "searchbox", "Filter", editable=True),
            node(4, "list", "Incidents", children=[node(r["id"], "listitem", r["name"], r["text"]) for r in rows]),
        ])
        obs = "\n".join(render_full(root)) + "\n"
        diff = "(no changes)" if prev_rows is None or not changes else "\n".join(changes)
        target = rows[rng.randrange(len(rows))]["id"]
        action = {"kind": "click", "target_id": target, "argument": "", "subgoals": []}
        if i == 19:
            action = {"kind": "answer", "target_id": None, "argument": "done", "subgoals": []}
        steps.append({"index": i, "thought": f"Check the next incident (step {i}).", "action": action,
                      "observation_full": obs, "diff_from_prev": diff,
                      "result_note": "ok" if action["kind"] == "click" else "answered"})
        prev_rows = [dict(r) for r in rows]
        actions.append(action)
    with open(OUT / "trajectory_20.ndjson", "w") as f:
        for s in steps:
            f.write(json.dumps(s, ensure_ascii=False) + "\n")


def luhn_ok(digits):
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


def card_with_prefix(prefix, length, rng):
    while True:
        body = prefix + "".join(str(rng.randrange(10)) for _ in range(length - len(prefix) - 1))
        for check in range(10):
            if luhn_ok(body + str(check)):
                return body + str(check)


def pii_fixture():
    rng = random.Random(25)
    emails = ["a.b@corp.example", "jane.doe@mail.example.org", "ops-team+alerts@infra.example",
              "k.tanaka@research.example.jp", "billing@vendor.example", "m_ruiz@health.example",
              "first.last@uni.example.edu", "sam.oneil@legal.example", "x9@short.example",
              "helpdesk@catalog.example"]
    phones = ["(415) 555-0134", "415-555-0178", "212.555.0199", "+1 646 555 0123",
              "+44 20 7946 0958", "+49 30 901820", "+33 1 23 45 67 89", "+81 3-1234-5678"]
    cards = []
    for prefix, length in [("4532", 16), ("4916", 16), ("5425", 16), ("2221", 16),
                           ("3714", 15), ("6011", 16), ("3530", 19)]:
        digits = card_with_prefix(prefix, length, rng)
        if length == 16:
            cards.append(" ".join(digits[i:i + 4] for i in range(0, 16, 4)))
        elif length == 15:
            cards.append(f"{digits[:4]}-{digits[4:10]}-{digits[10:]}")
        else:
            cards.append(digits)
    seeded = emails + phones + cards
    assert len(seeded) == 25
    write_json(OUT / "pii" / "seeded.json", {"emails": emails, "phones": phones, "cards": cards})

    # A behavior log that scatters every seeded string over payloads, titles,
    # element names and urls.
    t0 = 1_767_225_600_000
    events = []
    ts = t0
    site = "https://forms.example"

    def ev(kind, url, title, element=None, payload=None, digest=""):
        nonlocal ts
        e = {"ts": ts, "session_id": "pii-corpus", "tab_id": "tab-1", "site": site, "url": url,
             "title": title, "kind": kind, "snapshot_digest": digest or f"d{ts}"}
        if element:
            e["element"] = element
        if payload is not None:
            e["payload"] = payload
        events.append(e)
        ts += 4000

    for i, s in enumerate(seeded):
        slot = i % 4
        if slot == 0:
            ev("page_view", f"{site}/contact?ref={i}", f"Contact form for {s}")
            ev("input", f"{site}/contact?ref={i}", "Contact form",
               {"role": "textbox", "name": "Message", "id": 11}, f"Please reach me at {s} today")
        elif slot == 1:
            ev("input", f"{site}/profile", "Profile", {"role": "textbox", "name": "Contact", "id": 12}, s)
        elif slot == 2:
            ev("click", f"{site}/directory", "Directory", {"role": "link", "name": f"Call {s}", "id": 13})
        else:
            ev("page_view", f"{site}/search?raw={s}", "Search results")
            ev("input", f"{site}/checkout", "Checkout",
               {"role": "textbox", "name": "Payment details", "id": 14}, f"card {s} exp 12/29")
        if i in (8, 17):
            ts += 45 * 60_000  # idle gap: new segment
    with open(OUT / "pii" / "pii-corpus.ndjson", "w") as f:
        for e in events:
            f.write(json.dumps(e, ensure_ascii=False) + "\n")


def action(call):
    return "ACTION: " + call


def scripted_models():
    tasks = {t["task_id"]: t for f in sorted((ROOT / "tasks").glob("*.json"))
             for t in json.loads(f.read_text())}
    models = OUT / "models"

    def catalog_script(task_id):
        t = tasks[task_id]
        return [f"Step {i + 1} of the known procedure.\n{a}" for i, a in enumerate(t["solution"])]

    write_json(models / "catalog_order_01.json", {"tasks": {
        tasks["catalog_order_01"]["instruction"]: catalog_script("catalog_order_01")}})

    write_json(models / "one_click.json", {"default": [action("click(2)"), action('answer("done")')]})
    write_json(models / "never_answer.json", {"default": [action("request_full_tree()")]})
    write_json(models / "malformed.json", {"default": ["I am not sure what to do.", action('answer("gave up")')]})

    options = ["Order sales laptop", "File expense report", "Renew VPN certificate"]
    choices = "CHOICES: " + json.dumps(options)
    write_json(models / "resume_pending.json", {"tasks": {"Resume my pending work": [
        "Look for open tasks first.\n" + action('search_workspace("pending work")'),
        "Several tasks are open; let the user pick.\n" + action("answer(" + json.dumps(choices) + ")"),
        "Continue with the selected task.\n" + action('answer("Resuming the selected task")'),
    ]}})

    subgoals = ["Find the VPN port", "Find the password reset limit", "Find the printer floor"]
    write_json(models / "decompose_three.json", {"tasks": {
        "Collect the three IT facts": [
            "These lookups are independent.\n" + action("decompose(" + ", ".join(json.dumps(g) for g in subgoals) + ")")],
        subgoals[0]: [action('answer("443")')],
        subgoals[1]: [action('answer("90")')],
        subgoals[2]: [action('answer("4")')],
    }})


if __name__ == "__main__":
    ax_fixtures()
    trajectory_fixture()
    pii_fixture()
    scripted_models()
