#!/usr/bin/env python3
# Copyright 2026 The QUDeval Toolkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Deterministic stand-in for an OpenAI-compatible chat endpoint.

Recognizes each prompt template and answers with a reply derived from a
hash of the prompt, including some off-format replies, so the recorded
fixtures exercise the lenient parsers and the reprompt path. Used only to
record the sample fixtures:

    tools/stub_llm.py 18080 &
    QUDEVAL_LLM_API_KEY=stub qudeval evaluate --mode record \
        --llm-config data/sample/llm.json ...
"""

import hashlib
import json
import re
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

SENTENCE = re.compile(r"(?<=[.!?])\s+")
OPTION = re.compile(r"^\s*(\d): (.+)$", re.M)


def sentences(text):
    return [s for s in SENTENCE.split(text.strip()) if s]


def after(prompt, marker):
    return prompt.rsplit(marker, 1)[1].split("\n", 1)[0].strip()


def pick_option(prompt, h):
    options = dict(OPTION.findall(prompt.rsplit("Context:", 1)[-1]) or OPTION.findall(prompt))
    n = str(h % 3 + 1)
    text = options.get(n, "option")
    style = (h >> 8) % 10
    if style == 0:
        return "I am not sure which option applies here."
    if style < 5:
        return f"[{n}: {text}]"
    if style < 7:
        return n
    if style < 9:
        return f"Selected option: [{n}: {text}]"
    return f"I think option {n} fits best."


def reply(prompt):
    h = int(hashlib.sha256(prompt.encode()).hexdigest()[:12], 16)
    if "Reply with exactly one line of the form" in prompt:
        options = dict(OPTION.findall(prompt))
        n = str(h % 3 + 1)
        return f"[{n}: {options.get(n, 'option')}]"
    if "Which sentence in the article is closest" in prompt:
        target = re.search(r"closest to the sentence: '(.*)'", prompt, re.S).group(1)
        if h % 5:
            return target
        return sentences(after(prompt, "article:"))[h % 3]
    if "Answer the question in one sentence" in prompt:
        article = sentences(after(prompt, "article:"))
        return article[h % len(article)]
    if "score between 1 to 100" in prompt:
        score = h % 100 + 1
        return f"Score: {score}" if h & 1 else str(score)
    if "scale from 1 to 5" in prompt:
        return f"{1 + (h % 41) / 10:.1f}"
    if prompt.rstrip().endswith("Anchor Sentence:"):
        context = sentences(after(prompt, "Context:"))
        choice = context[h % max(1, len(context) - 1)]
        return choice if h % 4 else " ".join(choice.split()[:-2])
    if prompt.rstrip().endswith("Question:"):
        answer = after(prompt, "Target Answer:").rstrip(".").split()
        focus = " ".join(w.lower() for w in answer[1:4])
        stems = ["Why does {} matter?", "What happened with {}?", "How did {} change?"]
        question = stems[h % 3].format(focus or "this")
        return f"Question: {question}" if h % 2 else question
    return pick_option(prompt, h)


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        prompt = body["messages"][0]["content"]
        if body.get("temperature") != 0:
            self.send_error(400, "temperature must be 0")
            return
        out = json.dumps({"choices": [{"message": {"content": reply(prompt)}}],
                          "usage": {"prompt_tokens": len(prompt.split()),
                                    "completion_tokens": 8}}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(out)))
        self.end_headers()
        self.wfile.write(out)

    def log_message(self, *args):
        pass


if __name__ == "__main__":
    ThreadingHTTPServer(("127.0.0.1", int(sys.argv[1])), Handler).serve_forever()
