#!/usr/bin/env python3
"""End-to-end demo: ingest a DDL and an XSD, match, summarize, decide,
analyze, export. Writes everything into ./demo_out (or --out DIR).

The fixture mirrors the shape of a real engagement: a relational schema and
an XML schema that describe overlapping domains with different naming
conventions, reconciled through shared documentation.
"""

import argparse
import sys
from pathlib import Path

from schemamatch.cli import main as cli

DDL = """
CREATE TABLE All_Event_Vitals (
    DATE_BEGIN_156 DATE COMMENT 'the begin date of the event',
    EVENT_CODE VARCHAR(10) COMMENT 'coded event category value',
    SEVERITY_NUM INTEGER COMMENT 'numeric severity grade'
) COMMENT 'vital signs recorded per event';

CREATE TABLE Person_Master (
    PERSON_NAME VARCHAR(60) COMMENT 'full name of the person',
    PERSON_RANK VARCHAR(10) COMMENT 'rank or grade of the person'
) COMMENT 'master record per person';

CREATE TABLE Vehicle_Registry (
    REG_CODE VARCHAR(12) COMMENT 'unique vehicle registration code',
    MAKE_MODEL VARCHAR(40) COMMENT 'make and model description'
);
"""

XSD = """<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:complexType name="EventInformation">
    <xs:annotation><xs:documentation>vital information per observed event</xs:documentation></xs:annotation>
    <xs:sequence>
      <xs:element name="DATETIME_FIRST_INFO" type="xs:dateTime">
        <xs:annotation><xs:documentation>the begin date of the event</xs:documentation></xs:annotation>
      </xs:element>
      <xs:element name="eventCategoryCode" type="xs:string">
        <xs:annotation><xs:documentation>coded event category value</xs:documentation></xs:annotation>
      </xs:element>
    </xs:sequence>
  </xs:complexType>
  <xs:complexType name="PersonRecord">
    <xs:sequence>
      <xs:element name="personFullName" type="xs:string">
        <xs:annotation><xs:documentation>full name of the person</xs:documentation></xs:annotation>
      </xs:element>
      <xs:element name="serviceGrade" type="xs:string">
        <xs:annotation><xs:documentation>rank or grade of the person</xs:documentation></xs:annotation>
      </xs:element>
    </xs:sequence>
  </xs:complexType>
</xs:schema>
"""


def run(argv: list[str]) -> None:
    code = cli(argv)
    if code != 0:
        sys.exit(f"step failed ({code}): {' '.join(argv)}")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="demo_out")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    (out / "a.ddl").write_text(DDL, encoding="utf-8")
    (out / "b.xsd").write_text(XSD, encoding="utf-8")
    session = str(out / "session.json")

    run(["ingest", str(out / "a.ddl"), "--format", "ddl", "--id", "sa", "--out", str(out / "sa.json")])
    run(["ingest", str(out / "b.xsd"), "--format", "xsd", "--id", "sb", "--out", str(out / "sb.json")])
    run(["match", str(out / "sa.json"), str(out / "sb.json"), "--out", session])
    run(["summarize", session, "--schema", "sa", "--suggest"])
    run(["summarize", session, "--schema", "sa",
         "--assign", "Event=sa:1,sa:2,sa:3,sa:4",
         "--assign", "Person=sa:5,sa:6,sa:7"])
    run(["summarize", session, "--schema", "sb",
         "--assign", "Event=sb:1,sb:2,sb:3",
         "--assign", "Person=sb:4,sb:5,sb:6"])
    run(["decide", session, "--pair", "sa:2:sb:2", "--status", "accepted",
         "--annotation", "equivalent", "--author", "demo"])
    run(["decide", session, "--pair", "sa:3:sb:3", "--status", "accepted",
         "--annotation", "equivalent", "--author", "demo"])
    run(["decide", session, "--pair", "sa:6:sb:5", "--status", "accepted",
         "--annotation", "equivalent", "--author", "demo"])
    run(["analyze", session, "--partition", "--out", str(out / "partition.txt")])
    run(["analyze", session, "--vocabulary", "--out", str(out / "vocabulary.txt")])
    run(["export", session, "--concepts", "--out", str(out / "concepts.csv")])
    run(["export", session, "--elements", "--out", str(out / "elements.csv")])
    run(["export", session, "--matrix", "--min-score", "0.0", "--out", str(out / "matrix.csv")])
    print(f"\ndemo artifacts in {out}/")
    print((out / "partition.txt").read_text(encoding="utf-8"))


if __name__ == "__main__":
    main()
