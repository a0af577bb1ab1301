#!/usr/bin/env python3
"""Freezes reference TLSH digests and diffxlen distances into a JSON fixture.

Needs the reference implementation's Python binding: pip install py-tlsh
Usage: tlsh_oracle.py > ../fixtures/tlsh_cases.json
"""
import json
import random
import sys

import tlsh

rng = random.Random(20240611)

# A normalized C function (>= 512 bytes) and a variant with one identifier renamed.
BODY = (
    "staticintparse_header(conststructbuffer*buf,size_tlen,structheader*out){"
    "size_ti;uint32_tacc=0x811c9dc5u;if(buf==NULL||out==NULL){return-1;}"
    "for(i=0;i<len;i++){acc^=(uint32_t)buf->data[i];acc*=16777619u;"
    "if(buf->data[i]=='\\n'){out->lines++;}elseif(buf->data[i]=='\\t'){out->tabs+=4;}}"
    "out->checksum=acc;out->length=len;if(len>out->capacity){out->truncated=1;"
    "memcpy(out->scratch,buf->data,out->capacity);}else{memcpy(out->scratch,buf->data,len);}"
    "switch(out->kind){case1:out->flags|=0x10;break;case2:out->flags|=0x20;break;"
    "default:out->flags=0;}while(acc>65535){acc>>=3;out->rounds++;}"
    "returnout->truncated?-2:(int)(acc&0x7fff);}"
)
RENAMED = BODY.replace("parse_header", "parse_hdr")

ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789_(){};=+-*/<>!&|^%,.[]'\"\\"


def random_text(n):
    return "".join(rng.choice(ALPHABET) for _ in range(n))


def mutate(s, k):
    chars = list(s)
    for _ in range(k):
        chars[rng.randrange(len(chars))] = rng.choice(ALPHABET)
    return "".join(chars)


def digest(text):
    d = tlsh.hash(text.encode("latin-1"))
    if d in ("", "TNULL"):
        return None
    return d[2:].lower() if d.startswith("T1") else d.lower()


inputs = [BODY, RENAMED, "x" * 60, "ab" * 40, "int f(void){return 0;}"]
for n in [50, 51, 64, 100, 255, 256, 1000, 4096]:
    inputs.append(random_text(n))
for _ in range(24):
    base = random_text(rng.randrange(60, 1500))
    inputs.append(base)
    inputs.append(mutate(base, rng.randrange(1, 30)))

cases = [{"text": t, "digest": digest(t)} for t in inputs]
pairs = []
valid = [i for i, c in enumerate(cases) if c["digest"]]
for i in range(0, len(valid) - 1):
    a, b = valid[i], valid[i + 1]
    pairs.append({"a": a, "b": b, "distance": tlsh.diffxlen("T1" + cases[a]["digest"], "T1" + cases[b]["digest"])})
for _ in range(40):
    a, b = rng.choice(valid), rng.choice(valid)
    pairs.append({"a": a, "b": b, "distance": tlsh.diffxlen("T1" + cases[a]["digest"], "T1" + cases[b]["digest"])})

json.dump({"cases": cases, "pairs": pairs}, sys.stdout, indent=1)
sys.stdout.write("\n")
