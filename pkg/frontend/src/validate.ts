/** Client-side validation of template parameters.
 *
 * Mirrors the scalar types of block object declarations so obviously broken
 * values never reach the service; the service's 422 findings remain the
 * authority for anything structural (dangling references, type clashes).
 */

const IDENTIFIER = /^[A-Za-z][A-Za-z0-9_]*$/;
const INTEGER = /^\d+$/;
// absolute day, date arithmetic (28+42) or relative offset (+14)
const DATE = /^\+?\d+([+*/-]\d+)*$/;
const NAME = /^[A-Za-z][A-Za-z0-9_ .-]*$/;
const ARITH = /^[A-Za-z0-9_+*/() -]+$/;

export function validateParam(type: string, value: string): string | null {
  const trimmed = value.trim();
  if (!trimmed) return "a value is required";
  switch (type) {
    case "Identifier":
      return IDENTIFIER.test(trimmed) ? null : "must be an identifier";
    case "Integer":
      return INTEGER.test(trimmed) ? null : "must be a whole number";
    case "Date":
      return DATE.test(trimmed)
        ? null
        : "must be a day number, date arithmetic or a +offset";
    case "String":
      return NAME.test(trimmed) ? null : "must be a plain name";
    case "BlockRef":
      return IDENTIFIER.test(trimmed) ? null : "must name a block";
    case "ClaimRef":
    case "ObjectRef":
    case "PersonRef":
      return IDENTIFIER.test(trimmed) ? null : "must reference a declared object";
    case "Arith":
      return ARITH.test(trimmed) ? null : "must be an integer expression";
    default:
      return null;
  }
}

export interface ParamErrors {
  [param: string]: string;
}

export function validateParams(
  params: { name: string; type: string }[],
  values: Record<string, string>,
): ParamErrors {
  const errors: ParamErrors = {};
  for (const param of params) {
    const problem = validateParam(param.type, values[param.name] ?? "");
    if (problem) errors[param.name] = problem;
  }
  return errors;
}
