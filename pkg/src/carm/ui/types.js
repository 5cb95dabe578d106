// Payload shapes for the /api endpoints. The UI never computes any of
// these numbers itself; everything here arrives from the service.
export const METRIC_NAMES = [
    "coverage",
    "confidence",
    "interest",
    "surprise",
    "rule_difference",
];
