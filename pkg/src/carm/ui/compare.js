export function commonMetrics(entries) {
    if (entries.length === 0)
        return [];
    return entries[0].metricNames.filter((name) => entries.every((e) => e.metricNames.includes(name)));
}
/** Overlay needs two or more runs sharing at least two metrics. */
export function overlayStatus(entries) {
    if (entries.length < 2)
        return { ok: false, reason: "select at least two runs to compare" };
    const shared = commonMetrics(entries);
    if (shared.length < 2)
        return { ok: false, reason: "selected runs share fewer than two metrics" };
    return { ok: true, axes: shared };
}
export function overlaySeries(entries, xAxis, yAxis) {
    return entries.map((entry, i) => ({
        runId: entry.runId,
        label: entry.label,
        colorIndex: i,
        points: entry.front.map((row) => ({
            x: row.metrics[xAxis] ?? 0,
            y: row.metrics[yAxis] ?? 0,
            rule_id: row.rule_id,
            label: row.text,
        })),
    }));
}
