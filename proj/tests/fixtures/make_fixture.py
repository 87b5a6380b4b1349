#!/usr/bin/env python3
"""Writes the three-thread ingest fixture, its expected-values sheet and a
small embedding table covering the fixture vocabulary.

Every post is built from sentences whose word counts are known at
construction time, so the sheet is filled in by bookkeeping rather than by
re-running any tokenizer or splitter.

    python3 make_fixture.py [outdir]
"""

import json
import os
import random
import sys

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))

NOUNS = ["honey", "wax", "queens", "drones", "hives", "pollen", "smoke", "gloves",
         "frames", "flowers", "clover", "lavender", "winter", "summer", "mites",
         "swarms", "nectar", "combs", "veils", "larvae"]

# (template, words) - {} is one noun.
QUESTIONS = [
    ("What is your favorite {}?", 5),
    ("How do you handle {} in winter?", 7),
    ("Do you ever worry about {}?", 6),
    ("Why did you choose {}?", 5),
]

STATEMENT = ("Thanks for doing this.", 1, 4)
TWO_SENTENCES = ("I love {}. Why do bees swarm?", 2, 7)
HOST_REPLY = ("Great question, thanks.", 1, 3)
OTHER_REPLY = ("Same here.", 1, 2)


class Builder:
    def __init__(self, tid, title, host, start, selftext, sentences, words):
        self.tid = tid
        self.title = title
        self.host = host
        self.start = start
        self.selftext = selftext
        self.posts = []
        # Root counts as a post in the statistics.
        self.n_posts = 1
        self.n_sentences = sentences
        self.n_words = words

    def post(self, pid, parent, author, body, t, sentences, words, counted=True):
        self.posts.append({"id": "t1_" + pid if parent is not None and len(self.posts) % 3 == 0 else pid,
                           "parent_id": parent, "author": author, "body": body, "created_utc": t})
        if counted:
            self.n_posts += 1
            self.n_sentences += sentences
            self.n_words += words

    def line(self, rng):
        posts = list(self.posts)
        rng.shuffle(posts)
        return {"id": "t3_" + self.tid, "title": self.title, "selftext": self.selftext,
                "author": self.host, "created_utc": self.start, "posts": posts}


def question(k):
    template, words = QUESTIONS[k % len(QUESTIONS)]
    return template.format(NOUNS[k % len(NOUNS)]), words


def thread_one(expected):
    # 2015-03-01T00:00:00Z; 120 first-tier posts, one per minute.
    start = 1425168000
    b = Builder("amaq01", "I am a beekeeper, AMA", "beekeeper", start,
                "I keep bees. Ask me anything!", 2, 6)
    root = "t3_amaq01"
    host_last = start + 6030
    for k in range(1, 121):
        pid = "a%03d" % k
        t = start + 60 * k
        author = "user%d" % k
        late = k > 100
        kind = k % 6
        rec = None
        if k == 13:
            body = "Have you read [this guide](http://example.com/faq?id=3)?"
            b.post(pid, root, author, body, t, 1, 5)
            b.post("r%03d" % k, pid, b.host, HOST_REPLY[0], t + 20, 1, 3)
            rec = ("Have you read this guide?", 1, 1)
        elif k == 50:
            # Host asking a first-tier question is not a question post.
            b.post(pid, root, b.host, "Anyone else here keep bees?", t, 1, 5)
            expected["excluded_host"].append(pid)
        elif k == 60:
            b.post(pid, root, author, "Why?!", t, 1, 1)
            expected["excluded_not_question"].append(pid)
        elif kind == 5:
            body = TWO_SENTENCES[0].format(NOUNS[k % len(NOUNS)])
            b.post(pid, root, author, body, t, 2, 7)
            expected["excluded_not_question"].append(pid)
        elif kind == 0:
            b.post(pid, root, author, STATEMENT[0], t, 1, 4)
            expected["excluded_not_question"].append(pid)
        else:
            text, words = question(k)
            b.post(pid, root, author, text, t, 1, words)
            if late:
                # After the host's last post: no host replies here.
                if kind == 2:
                    b.post("r%03d" % k, pid, "helper%d" % k, OTHER_REPLY[0], t + 10, 1, 2)
                expected["excluded_active_period"].append(pid)
            elif kind == 1:
                b.post("r%03d" % k, pid, b.host, HOST_REPLY[0], t + 20, 1, 3)
                rec = (text, 1, 1)
            elif kind == 2:
                b.post("r%03d" % k, pid, "helper%d" % k, OTHER_REPLY[0], t + 10, 1, 2)
                # A deleted account never counts as the host.
                b.post("d%03d" % k, pid, "[deleted]", HOST_REPLY[0], t + 15, 1, 3)
                rec = (text, 0, 0)
            elif kind == 3:
                rec = (text, 0, 0)
            elif kind == 4:
                b.post("r%03d" % k, pid, "helper%d" % k, OTHER_REPLY[0], t + 10, 1, 2)
                b.post("g%03d" % k, "r%03d" % k, b.host, HOST_REPLY[0], t + 20, 1, 3)
                rec = (text, 0, 1)
        if rec:
            expected["questions"].append({"thread_id": "amaq01", "post_id": pid, "text": rec[0],
                                          "created_utc": t, "label": rec[1], "label_subtree": rec[2]})
    # Host's last word, under a statement post.
    b.post("z001", "a006", b.host, "That is all for today. Bye!", host_last, 2, 6)
    # Orphan whose parent never made it into the dump.
    b.post("o001", "t1_missing", "lost", "Is this thing on?", start + 100, 1, 4, counted=False)
    expected["active_period"]["amaq01"] = [start, host_last]
    return b


def thread_two(expected):
    # 2016-06-01T12:00:00Z; exactly 100 first-tier posts.
    start = 1464782400
    b = Builder("amaq02", "I study volcanoes AMA", "volcanologist", start,
                "I study volcanoes for a living.", 1, 6)
    root = "amaq02"
    for k in range(1, 101):
        pid = "b%03d" % k
        t = start + 60 * k
        author = "fan%d" % k
        kind = k % 4
        if kind == 1:
            text, words = question(k)
            b.post(pid, root, author, text, t, 1, words)
            b.post("s%03d" % k, pid, b.host, HOST_REPLY[0], t + 20, 1, 3)
            expected["questions"].append({"thread_id": "amaq02", "post_id": pid, "text": text,
                                          "created_utc": t, "label": 1, "label_subtree": 1})
        elif kind == 2:
            text, words = question(k)
            b.post(pid, root, author, text, t, 1, words)
            expected["questions"].append({"thread_id": "amaq02", "post_id": pid, "text": text,
                                          "created_utc": t, "label": 0, "label_subtree": 0})
        elif kind == 3:
            body = TWO_SENTENCES[0].format(NOUNS[k % len(NOUNS)])
            b.post(pid, root, author, body, t, 2, 7)
            expected["excluded_not_question"].append(pid)
        else:
            b.post(pid, root, author, STATEMENT[0], t, 1, 4)
            expected["excluded_not_question"].append(pid)
    b.post("s100", "b100", b.host, HOST_REPLY[0], start + 6020, 1, 3)
    expected["active_period"]["amaq02"] = [start, start + 6020]
    return b


def thread_three(expected):
    # 2017-01-10T00:00:00Z; plenty of first-tier posts but an AMA request.
    start = 1484006400
    b = Builder("amaq03", "[AMA Request] A famous chef", "chef_fan", start,
                "Would love to hear from a chef.", 1, 7)
    for k in range(1, 151):
        pid = "c%03d" % k
        text, words = question(k)
        b.post(pid, "t3_amaq03", "guest%d" % k, text, start + 30 * k, 1, words)
        b.post("e%03d" % k, pid, b.host, HOST_REPLY[0], start + 30 * k + 5, 1, 3)
    return b


def main():
    expected = {"kept_threads": ["amaq01", "amaq02"], "dropped_first_tier": 0,
                "dropped_ama_request": 1, "quarantined_posts": 1, "questions": [],
                "excluded_active_period": [], "excluded_not_question": [], "excluded_host": [],
                "active_period": {}, "stats": {}}
    threads = [thread_one(expected), thread_two(expected), thread_three(expected)]
    rng = random.Random(20150301)
    with open(os.path.join(OUT, "threads.jsonl"), "w") as f:
        for b in threads:
            f.write(json.dumps(b.line(rng), sort_keys=True) + "\n")

    # Corpus statistics cover every thread in the dump, filtered or not.
    for b, year in ((threads[0], 2015), (threads[1], 2016), (threads[2], 2017)):
        qs = [q for q in expected["questions"] if q["thread_id"] == b.tid]
        answered = sum(q["label"] for q in qs)
        expected["stats"][str(year)] = {
            "threads": 1, "posts": b.n_posts, "sentences": b.n_sentences, "words": b.n_words,
            "question_posts": len(qs), "answered": answered}
    expected["questions"].sort(key=lambda q: (q["thread_id"], q["post_id"]))
    with open(os.path.join(OUT, "expected.json"), "w") as f:
        json.dump(expected, f, indent=1, sort_keys=True)
        f.write("\n")

    vocab = set()
    for tmpl, _ in QUESTIONS:
        vocab.update(w.lower() for w in tmpl.replace("{}", "").replace("?", "").split())
    vocab.update(NOUNS)
    vocab.update(["have", "you", "read", "this", "guide", "?"])
    rng = random.Random(4)
    with open(os.path.join(OUT, "embeddings.txt"), "w") as f:
        words = sorted(vocab)
        f.write("%d 4\n" % len(words))
        for w in words:
            f.write(w + " " + " ".join("%.4f" % rng.uniform(-1, 1) for _ in range(4)) + "\n")


if __name__ == "__main__":
    main()
