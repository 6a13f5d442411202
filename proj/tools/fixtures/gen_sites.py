#!/usr/bin/env python3
"""Writes sites/*.json and tasks/*.json for the simulated environment."""

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[2]


class Page:
    def __init__(self, pid, url, title, root_id):
        self.pid, self.url, self.title = pid, url, title
        self.root = root_id
        self.elements = [{"id": root_id, "parent": None, "role": "WebArea", "name": title, "text": "",
                          "bbox": {"x": 0, "y": 0, "width": 1280, "height": 720}}]
        self.next_y = 24

    def add(self, eid, role, name, text="", parent=None, y=None, h=32, x=40, w=600, **extra):
        if y is None:
            y = self.next_y
        self.next_y = max(self.next_y, y + h + 16)
        el = {"id": eid, "parent": parent if parent is not None else self.root, "role": role, "name": name,
              "text": text, "bbox": {"x": x, "y": y, "width": w, "height": h}}
        el.update(extra)
        self.elements.append(el)
        bottom = y + h + 24
        if bottom > self.elements[0]["bbox"]["height"]:
            self.elements[0]["bbox"]["height"] = bottom
        return eid

    def json(self):
        return {"url": self.url, "title": self.title, "elements": self.elements}


class Site:
    def __init__(self, site_id, origin, start):
        self.site_id, self.origin, self.start = site_id, origin, start
        self.pages, self.transitions, self.counters = {}, [], {}

    def page(self, pid, url, title, root_id):
        p = Page(pid, url, title, root_id)
        self.pages[pid] = p
        return p

    def on(self, page, action, target=None, argument=None, *effects):
        t = {"page": page, "action": action}
        if target is not None:
            t["target"] = target
        if argument is not None:
            t["argument"] = argument
        t["effects"] = list(effects)
        self.transitions.append(t)

    def json(self):
        return {"site_id": self.site_id, "origin": self.origin, "start_page": self.start,
                "viewport": {"width": 1280, "height": 720},
                "pages": {k: v.json() for k, v in self.pages.items()},
                "transitions": self.transitions, "counters": self.counters}


def goto(page):
    return {"type": "goto", "page": page}


def set_text(page, eid, text):
    return {"type": "set_text", "page": page, "id": eid, "text": text}


def set_field(field, text):
    return {"type": "set_field", "field": field, "text": text}


def task(task_id, template, category, site, instruction, success, solution):
    return {"task_id": task_id, "template_id": template, "category": category, "site_id": site,
            "instruction": instruction, "success": success, "solution": solution}


def page_reached(page):
    return {"type": "page_reached", "page": page}


def field_eq(field, text):
    return {"type": "field_equals", "field": field, "text": text}


def answer_has(text, page=None):
    c = {"type": "answer_contains", "text": text}
    if page:
        c["page"] = page
    return c


def q(s):
    return json.dumps(s)


# ---------------------------------------------------------------------------


def service_catalog():
    s = Site("service-catalog", "https://catalog.example", "home")
    s.counters = {"req": 10000}
    home = s.page("home", "https://catalog.example/", "Home", 1)
    home.add(2, "link", "Service Catalog")
    home.add(3, "link", "My Requests")
    home.add(4, "heading", "Welcome", "Order hardware and software for your team.")
    home.add(5, "link", "Knowledge")

    cat = s.page("catalog", "https://catalog.example/catalog", "Service Catalog", 10)
    cat.add(11, "heading", "Service Catalog")
    cat.add(12, "listitem", "Hardware", "Laptops, monitors and peripherals")
    cat.add(13, "listitem", "Software", "Licenses and subscriptions")
    cat.add(14, "listitem", "Services", "Facilities and access")

    hw = s.page("hardware", "https://catalog.example/catalog/hardware", "Hardware", 20)
    hw.add(21, "heading", "Hardware")
    hw.add(22, "listitem", "Sales Laptop", "Lightweight laptop for field sales")
    hw.add(23, "listitem", "Developer Laptop", "High-memory laptop for engineering")
    hw.add(24, "listitem", "Standard Monitor", "27 inch display")

    s.on("home", "click", 2, None, goto("catalog"))
    s.on("catalog", "click", 12, None, goto("hardware"))
    s.on("hardware", "click", 22, None, goto("sales_laptop"))
    s.on("hardware", "click", 23, None, goto("developer_laptop"))
    s.on("hardware", "click", 24, None, goto("monitor"))

    conf = s.page("confirmation", "https://catalog.example/request/confirmation", "Order Confirmation", 90)
    conf.add(91, "heading", "Thank you", "Your request has been submitted.")
    conf.add(92, "status", "Request number", "")
    conf.add(93, "button", "Copy request number")
    conf.add(94, "status", "Clipboard", "")
    s.on("confirmation", "click", 93, None, set_text("confirmation", 94, "Copied ${value:92}"),
         set_field("copied", "${value:92}"))

    def item(pid, url, title, root, options):
        p = s.page(pid, url, title, root)
        p.add(root + 1, "heading", title)
        p.add(root + 2, "paragraph", "Description", "Standard issue. Delivery in five business days.")
        p.add(root + 3, "spinbutton", "Quantity", "1", editable=True)
        group = p.add(root + 4, "group", "Software options", y=p.next_y + 220, h=40 * (len(options) + 1))
        for i, name in enumerate(options):
            p.add(root + 5 + i, "checkbox", name, "", parent=group, y=p.elements[-1]["bbox"]["y"] + 44 if i else
                  p.elements[-1]["bbox"]["y"] + 40, h=28)
        nxt = root + 5 + len(options)
        if options:
            p.add(nxt, "textbox", "Additional software requirements", "", y=p.next_y + 60, h=80,
                  editable=True)
        p.add(nxt + 1, "button", "Order Now", y=1120, w=160)
        effects = [set_text("confirmation", 92, "REQ${counter:req}"), set_field("item", title),
                   set_field("quantity", "${value:%d}" % (root + 3))]
        for i, name in enumerate(options):
            effects.append(set_field("option:" + name, "${value:%d}" % (root + 5 + i)))
        if options:
            effects.append(set_field("additional", "${value:%d}" % nxt))
        effects.append(goto("confirmation"))
        s.on(pid, "click", nxt + 1, None, *effects)
        return nxt, nxt + 1

    sales_add, sales_order = item("sales_laptop", "https://catalog.example/item/sales-laptop", "Sales Laptop", 30,
                                  ["Adobe Acrobat", "Microsoft Office 365", "Zoom"])
    dev_add, dev_order = item("developer_laptop", "https://catalog.example/item/developer-laptop",
                              "Developer Laptop", 50, ["Docker Desktop", "JetBrains Toolbox", "Slack"])
    _, mon_order = item("monitor", "https://catalog.example/item/monitor", "Standard Monitor", 70, [])

    answer_req = answer_has("${text:92}", "confirmation")
    tasks = [
        task("catalog_order_01", "order-sales-laptop", "service-catalog", s.site_id,
             "Order 2 Sales Laptops with Adobe Acrobat and the additional software 'Visio viewer', "
             "then report the request number.",
             [page_reached("confirmation"), field_eq("item", "Sales Laptop"), field_eq("quantity", "2"),
              field_eq("option:Adobe Acrobat", "checked"), field_eq("additional", "Visio viewer"),
              field_eq("copied", "${text:92}"), answer_req],
             ["ACTION: click(2)", "ACTION: click(12)", "ACTION: click(22)", 'ACTION: type_text(33, "2")',
              "ACTION: click(35)", 'ACTION: type_text(38, "Visio viewer")', "ACTION: click(%d)" % sales_order,
              "ACTION: click(93)", 'ACTION: answer("REQ0010001")']),
        task("catalog_order_02", "order-developer-laptop", "service-catalog", s.site_id,
             "Order one Developer Laptop with Docker Desktop and the additional software 'JetBrains license', "
             "then report the request number.",
             [page_reached("confirmation"), field_eq("item", "Developer Laptop"), field_eq("quantity", "1"),
              field_eq("option:Docker Desktop", "checked"), field_eq("additional", "JetBrains license"),
              field_eq("copied", "${text:92}"), answer_req],
             ["ACTION: click(2)", "ACTION: click(12)", "ACTION: click(23)", "ACTION: click(55)",
              'ACTION: type_text(58, "JetBrains license")', "ACTION: click(%d)" % dev_order, "ACTION: click(93)",
              'ACTION: answer("REQ0010001")']),
        task("catalog_order_03", "order-monitor", "service-catalog", s.site_id,
             "Order 3 Standard Monitors and report the request number.",
             [page_reached("confirmation"), field_eq("item", "Standard Monitor"), field_eq("quantity", "3"),
              field_eq("copied", "${text:92}"), answer_req],
             ["ACTION: click(2)", "ACTION: click(12)", "ACTION: click(24)", 'ACTION: type_text(73, "3")',
              "ACTION: click(%d)" % mon_order, "ACTION: click(93)", 'ACTION: answer("REQ0010001")']),
        task("catalog_order_04", "order-sales-laptop-office", "service-catalog", s.site_id,
             "Order a Sales Laptop with Microsoft Office 365 and Zoom and the additional software 'none', "
             "then report the request number.",
             [page_reached("confirmation"), field_eq("item", "Sales Laptop"), field_eq("quantity", "1"),
              field_eq("option:Microsoft Office 365", "checked"), field_eq("option:Zoom", "checked"),
              field_eq("copied", "${text:92}"), answer_req],
             ["ACTION: click(2)", "ACTION: click(12)", "ACTION: click(22)", "ACTION: click(36)", "ACTION: click(37)",
              'ACTION: type_text(38, "none")', "ACTION: click(%d)" % sales_order, "ACTION: click(93)",
              'ACTION: answer("REQ0010001")']),
    ]
    assert sales_add == 38 and dev_add == 58
    return s, tasks


def forms():
    s = Site("form", "https://forms.example", "home")
    s.counters = {"exp": 500}
    home = s.page("home", "https://forms.example/", "Forms", 100)
    home.add(101, "link", "New expense report")
    home.add(102, "link", "Request leave")
    home.add(103, "link", "Update address")
    s.on("home", "click", 101, None, goto("expense"))
    s.on("home", "click", 102, None, goto("leave"))
    s.on("home", "click", 103, None, goto("address"))

    done = s.page("done", "https://forms.example/submitted", "Form Submitted", 190)
    done.add(191, "heading", "Submitted", "We received your form.")
    done.add(192, "status", "Reference", "")

    ex = s.page("expense", "https://forms.example/expense", "Expense Report", 110)
    ex.add(111, "heading", "Expense report")
    ex.add(112, "textbox", "Amount", "", editable=True)
    ex.add(113, "combobox", "Category", "", options=["Travel", "Meals", "Supplies"])
    ex.add(114, "textbox", "Description", "", h=120, editable=True)
    ex.add(115, "button", "Submit", y=980, w=140)
    s.on("expense", "click", 115, None, set_field("form", "expense"), set_field("amount", "${value:112}"),
         set_field("category", "${value:113}"), set_field("description", "${value:114}"),
         set_text("done", 192, "EXP${counter:exp}"), goto("done"))

    lv = s.page("leave", "https://forms.example/leave", "Leave Request", 120)
    lv.add(121, "heading", "Leave request")
    lv.add(122, "textbox", "Start date", "", editable=True)
    lv.add(123, "textbox", "End date", "", editable=True)
    lv.add(124, "combobox", "Type", "", options=["Vacation", "Sick", "Personal"])
    lv.add(125, "button", "Submit", y=860, w=140)
    s.on("leave", "click", 125, None, set_field("form", "leave"), set_field("start", "${value:122}"),
         set_field("end", "${value:123}"), set_field("type", "${value:124}"), goto("done"))

    ad = s.page("address", "https://forms.example/address", "Address Change", 130)
    ad.add(131, "heading", "Update address")
    ad.add(132, "textbox", "Street", "", editable=True)
    ad.add(133, "textbox", "City", "", editable=True)
    ad.add(134, "textbox", "Postal code", "", editable=True)
    ad.add(135, "button", "Save", w=140)
    s.on("address", "click", 135, None, set_field("form", "address"), set_field("street", "${value:132}"),
         set_field("city", "${value:133}"), set_field("postal", "${value:134}"), goto("done"))

    tasks = [
        task("form_expense_01", "file-expense", "form", s.site_id,
             "File an expense report for 42.50 in the Meals category described as 'Team lunch'.",
             [page_reached("done"), field_eq("form", "expense"), field_eq("amount", "42.50"),
              field_eq("category", "Meals"), field_eq("description", "Team lunch")],
             ["ACTION: click(101)", 'ACTION: type_text(112, "42.50")', 'ACTION: select_option(113, "Meals")',
              'ACTION: type_text(114, "Team lunch")', "ACTION: click(115)"]),
        task("form_leave_01", "request-leave", "form", s.site_id,
             "Request vacation leave from 2026-11-02 to 2026-11-06.",
             [page_reached("done"), field_eq("form", "leave"), field_eq("start", "2026-11-02"),
              field_eq("end", "2026-11-06"), field_eq("type", "Vacation")],
             ["ACTION: click(102)", 'ACTION: type_text(122, "2026-11-02")', 'ACTION: type_text(123, "2026-11-06")',
              'ACTION: select_option(124, "Vacation")', "ACTION: click(125)"]),
        task("form_address_01", "change-address", "form", s.site_id,
             "Update my address to 12 Harbor Road, Portsmouth, PO1 3AX.",
             [page_reached("done"), field_eq("form", "address"), field_eq("street", "12 Harbor Road"),
              field_eq("city", "Portsmouth"), field_eq("postal", "PO1 3AX")],
             ["ACTION: click(103)", 'ACTION: type_text(132, "12 Harbor Road")', 'ACTION: type_text(133, "Portsmouth")',
              'ACTION: type_text(134, "PO1 3AX")', "ACTION: click(135)"]),
    ]
    return s, tasks


def knowledge():
    s = Site("knowledge", "https://kb.example", "home")
    home = s.page("home", "https://kb.example/", "Knowledge Base", 200)
    home.add(201, "searchbox", "Search articles", "", editable=True)
    home.add(202, "button", "Search", w=120)
    home.add(203, "heading", "Popular", "Most viewed this week")
    home.add(204, "link", "Travel policy")
    s.on("home", "click", 202, None, goto("results"))

    res = s.page("results", "https://kb.example/search", "Search Results", 210)
    res.add(211, "heading", "Results")
    res.add(212, "link", "Connecting to the VPN")
    res.add(213, "link", "Password expiry rules")
    res.add(214, "link", "Printing in color")
    s.on("results", "click", 212, None, goto("vpn"))
    s.on("results", "click", 213, None, goto("password"))
    s.on("results", "click", 214, None, goto("printer"))

    def article(pid, url, title, root, paragraphs):
        p = s.page(pid, url, title, root)
        p.add(root + 1, "heading", title)
        y = 120
        for i, (name, text, below) in enumerate(paragraphs):
            p.add(root + 2 + i, "paragraph", name, text, y=(900 + 60 * i) if below else y + 80 * i, h=60)
        return p

    article("vpn", "https://kb.example/article/vpn", "Connecting to the VPN", 220,
            [("Overview", "Install the client from the software portal.", False),
             ("Network", "The VPN client connects over TCP port 443.", True)])
    article("password", "https://kb.example/article/password", "Password expiry rules", 230,
            [("Policy", "Passwords are valid for 90 days.", False),
             ("Reset", "Use the self-service portal to reset.", False)])
    article("printer", "https://kb.example/article/printer", "Printing in color", 240,
            [("Devices", "Black and white printers are on every floor.", False),
             ("Color", "The color printer is on floor 4 next to the kitchen.", True)])

    tasks = [
        task("knowledge_vpn_01", "kb-vpn-port", "knowledge", s.site_id,
             "Look up which TCP port the VPN client uses and report it.",
             [answer_has("443")],
             ['ACTION: type_text(201, "vpn")', "ACTION: click(202)", "ACTION: click(212)",
              "ACTION: scroll_into(223)", 'ACTION: answer("Port 443")']),
        task("knowledge_password_01", "kb-password-days", "knowledge", s.site_id,
             "Find out for how many days a password stays valid and report the number.",
             [answer_has("90")],
             ['ACTION: type_text(201, "password")', "ACTION: click(202)", "ACTION: click(213)",
              'ACTION: answer("90 days")']),
        task("knowledge_printer_01", "kb-color-printer", "knowledge", s.site_id,
             "Find which floor the color printer is on and report it.",
             [answer_has("floor 4")],
             ['ACTION: type_text(201, "printer")', "ACTION: click(202)", "ACTION: click(214)",
              "ACTION: scroll_into(243)", 'ACTION: answer("floor 4")']),
    ]
    return s, tasks


def list_filter():
    s = Site("list-filter", "https://tickets.example", "list")
    rows = [("INC-101", "VPN outage", "High", "Open"), ("INC-102", "Printer jam", "Low", "Open"),
            ("INC-103", "Email delay", "High", "Open"), ("INC-104", "Badge reader", "Medium", "Closed"),
            ("INC-105", "Disk full", "High", "Open"), ("INC-106", "Monitor flicker", "Low", "Closed"),
            ("INC-107", "Wifi drops", "Medium", "Open")]

    def listing(pid, title, root, keep):
        p = s.page(pid, "https://tickets.example/incidents" + ("" if pid == "list" else "?" + pid.split("_", 1)[1]),
                   title, root)
        p.add(root + 1, "combobox", "Priority", "All", options=["All", "High", "Medium", "Low"])
        p.add(root + 2, "combobox", "State", "All", options=["All", "Open", "Closed"])
        table = p.add(root + 3, "table", "Incidents", h=40 * 8)
        shown = [r for r in rows if keep(r)]
        y = p.elements[-1]["bbox"]["y"] + 40
        for i, (num, desc, prio, state) in enumerate(shown):
            p.add(root + 10 + i, "row", num, "%s | %s | %s" % (desc, prio, state), parent=table, y=y + 40 * i, h=32)
        p.add(root + 30, "status", "Count", "%d incidents" % len(shown), y=y + 40 * len(shown) + 20)
        return p

    listing("list", "Incidents", 300, lambda r: True)
    listing("list_high", "Incidents: High", 400, lambda r: r[2] == "High")
    listing("list_low", "Incidents: Low", 450, lambda r: r[2] == "Low")
    listing("list_closed", "Incidents: Closed", 500, lambda r: r[3] == "Closed")
    for src, root in (("list", 300), ("list_high", 400), ("list_low", 450), ("list_closed", 500)):
        s.on(src, "select_option", root + 1, "High", goto("list_high"))
        s.on(src, "select_option", root + 1, "Low", goto("list_low"))
        s.on(src, "select_option", root + 1, "All", goto("list"))
        s.on(src, "select_option", root + 2, "Closed", goto("list_closed"))
        s.on(src, "select_option", root + 2, "All", goto("list"))
    det = s.page("incident_104", "https://tickets.example/incidents/INC-104", "INC-104 Badge reader", 550)
    det.add(551, "heading", "INC-104", "Badge reader at the north entrance")
    det.add(552, "paragraph", "Resolution", "Replaced the reader firmware.")
    s.on("list_closed", "click", 510, None, goto("incident_104"))

    tasks = [
        task("filter_high_01", "filter-high", "list-filter", s.site_id,
             "Show only the high priority incidents.",
             [page_reached("list_high")],
             ['ACTION: select_option(301, "High")']),
        task("filter_low_count_01", "count-low", "list-filter", s.site_id,
             "Filter the incidents to low priority and report how many there are.",
             [answer_has("2")],
             ['ACTION: select_option(301, "Low")', 'ACTION: answer("2 incidents")']),
        task("filter_closed_01", "open-closed", "list-filter", s.site_id,
             "Filter the incidents to the Closed state and open the first closed incident.",
             [page_reached("incident_104")],
             ['ACTION: select_option(302, "Closed")', "ACTION: click(510)"]),
    ]
    return s, tasks


def list_sort():
    s = Site("list-sort", "https://assets.example", "assets")
    assets = [("Laptop Dock", "2023-04-11", 189), ("Server Rack", "2021-09-30", 4200),
              ("Label Printer", "2019-02-14", 310), ("Conference Phone", "2022-06-01", 650),
              ("Projector", "2020-11-23", 980)]
    orders = {
        "assets": (lambda a: 0, False, "Assets"),
        "by_name": (lambda a: a[0], False, "Assets by name"),
        "by_cost_asc": (lambda a: a[2], False, "Assets by cost (ascending)"),
        "by_cost_desc": (lambda a: a[2], True, "Assets by cost (descending)"),
        "by_date_asc": (lambda a: a[1], False, "Assets by purchase date"),
    }
    roots = {"assets": 600, "by_name": 620, "by_cost_asc": 640, "by_cost_desc": 660, "by_date_asc": 680}
    for pid, (key, rev, title) in orders.items():
        root = roots[pid]
        p = s.page(pid, "https://assets.example/assets" + ("" if pid == "assets" else "?sort=" + pid[3:]), title, root)
        p.add(root + 1, "columnheader", "Name", w=200)
        p.add(root + 2, "columnheader", "Purchased", w=200, x=260, y=p.elements[-1]["bbox"]["y"])
        p.add(root + 3, "columnheader", "Cost", w=200, x=480, y=p.elements[-1]["bbox"]["y"])
        rows = assets if pid == "assets" else sorted(assets, key=key, reverse=rev)
        for i, (name, date, cost) in enumerate(rows):
            p.add(root + 5 + i, "row", name, "%s | %d" % (date, cost))
        s.on(pid, "click", root + 1, None, goto("by_name"))
        s.on(pid, "click", root + 2, None, goto("by_date_asc"))
        s.on(pid, "click", root + 3, None, goto("by_cost_desc" if pid == "by_cost_asc" else "by_cost_asc"))
    tasks = [
        task("sort_cost_01", "most-expensive", "list-sort", s.site_id,
             "Sort the assets by cost with the highest first and report the most expensive asset.",
             [answer_has("Server Rack")],
             ["ACTION: click(603)", "ACTION: click(643)", 'ACTION: answer("Server Rack")']),
        task("sort_name_01", "sort-name", "list-sort", s.site_id,
             "Sort the asset list by name.",
             [page_reached("by_name")],
             ["ACTION: click(601)"]),
        task("sort_date_01", "oldest-asset", "list-sort", s.site_id,
             "Sort the assets by purchase date and report the oldest one.",
             [answer_has("Label Printer")],
             ["ACTION: click(602)", 'ACTION: answer("Label Printer")']),
    ]
    return s, tasks


def dashboard():
    s = Site("dashboard", "https://metrics.example", "ops")

    def board(pid, url, title, root, rng, incidents, breaches):
        p = s.page(pid, url, title, root)
        p.add(root + 1, "combobox", "Time range", rng, options=["Last 7 days", "Last 30 days"])
        p.add(root + 2, "button", "Export", w=120)
        p.add(root + 3, "img", "Ticket volume chart", h=400)
        p.add(root + 4, "status", "SLA breaches", str(breaches), y=820)
        p.add(root + 5, "status", "Open incidents", str(incidents), y=880)
        s.on(pid, "select_option", root + 1, "Last 30 days", goto("ops_30"))
        s.on(pid, "select_option", root + 1, "Last 7 days", goto("ops"))
        s.on(pid, "click", root + 2, None, set_field("range", rng), goto("export"))

    board("ops", "https://metrics.example/ops", "Operations Dashboard", 700, "Last 7 days", 42, 3)
    board("ops_30", "https://metrics.example/ops?range=30d", "Operations Dashboard (30 days)", 720, "Last 30 days", 42, 7)
    ex = s.page("export", "https://metrics.example/export", "Export Report", 740)
    ex.add(741, "combobox", "Format", "PDF", options=["PDF", "CSV"])
    ex.add(742, "button", "Download", w=140)
    s.on("export", "click", 742, None, set_field("format", "${value:741}"), goto("exported"))
    done = s.page("exported", "https://metrics.example/export/done", "Export Ready", 760)
    done.add(761, "status", "Export", "Your file is ready.")

    tasks = [
        task("dash_incidents_01", "open-incidents", "dashboard", s.site_id,
             "Report the number of open incidents shown on the operations dashboard.",
             [answer_has("42")],
             ["ACTION: scroll_into(705)", 'ACTION: answer("42")']),
        task("dash_range_01", "breaches-30d", "dashboard", s.site_id,
             "Switch the dashboard to the last 30 days and report the SLA breach count.",
             [answer_has("7"), page_reached("ops_30")],
             ['ACTION: select_option(701, "Last 30 days")', "ACTION: scroll_into(724)", 'ACTION: answer("7")']),
        task("dash_export_01", "export-csv", "dashboard", s.site_id,
             "Export the operations dashboard report as CSV.",
             [page_reached("exported"), field_eq("format", "CSV")],
             ["ACTION: click(702)", 'ACTION: select_option(741, "CSV")', "ACTION: click(742)"]),
    ]
    return s, tasks


def main():
    sites_dir, tasks_dir = ROOT / "sites", ROOT / "tasks"
    sites_dir.mkdir(exist_ok=True)
    tasks_dir.mkdir(exist_ok=True)
    for build in (service_catalog, forms, knowledge, list_filter, list_sort, dashboard):
        site, tasks = build()
        (sites_dir / (site.site_id + ".json")).write_text(json.dumps(site.json(), indent=1) + "\n")
        (tasks_dir / (site.site_id + ".json")).write_text(json.dumps(tasks, indent=1) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
