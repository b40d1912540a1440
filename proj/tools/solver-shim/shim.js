// SMT-LIB2 front-end over the z3 WebAssembly build.
//
// Speaks the incremental solver protocol on stdin/stdout: one command per
// line (multi-line commands are accepted as long as parentheses balance),
// replies "success" after silent commands when :print-success is on.
// Supported commands are the subset a QF-LIA client needs: declarations,
// assertions (plain and :named), push/pop, check-sat, get-value, get-model,
// get-unsat-core, get-info :reason-unknown, echo, reset, exit.

'use strict';

const { init } = require('z3-solver');

function tokenizeTopLevel(cmd) {
  // Splits "(assert (>= x 1))" into ["assert", "(>= x 1)"] style pieces.
  const inner = cmd.trim().replace(/^\(/, '').replace(/\)$/, '');
  const parts = [];
  let depth = 0, cur = '', inStr = false;
  for (const ch of inner) {
    if (inStr) {
      cur += ch;
      if (ch === '"') inStr = false;
      continue;
    }
    if (ch === '"') { inStr = true; cur += ch; continue; }
    if (ch === '(') depth++;
    if (ch === ')') depth--;
    if (depth === 0 && /\s/.test(ch)) {
      if (cur.length) parts.push(cur);
      cur = '';
    } else {
      cur += ch;
    }
  }
  if (cur.length) parts.push(cur);
  return parts;
}

async function main() {
  const { Z3 } = await init();
  const cfg = Z3.mk_config();
  Z3.set_param_value(cfg, 'model', 'true');
  const ctx = Z3.mk_context(cfg);
  Z3.del_config(cfg);

  let solver = Z3.mk_solver(ctx);
  Z3.solver_inc_ref(ctx, solver);

  const intSort = Z3.mk_int_sort(ctx);
  const boolSort = Z3.mk_bool_sort(ctx);

  let printSuccess = false;
  let produceCores = false;
  let decls = [];                  // [{name, sym, decl, app}]
  let declByName = new Map();
  let scopeStack = [];             // decl-table sizes at push
  let trackByAstId = new Map();    // tracking bool ast id -> label
  let lastCheck = 'unknown';

  function out(line) { process.stdout.write(line + '\n'); }
  function ok() { if (printSuccess) out('success'); }
  function err(msg) { out('(error "' + String(msg).replace(/"/g, "'") + '")'); }

  function declareConst(name, sortName) {
    if (declByName.has(name)) {
      // Same name re-declared in a nested scope maps to the same z3 decl;
      // harmless because sorts never change here.
      return;
    }
    const sort = sortName === 'Bool' ? boolSort : intSort;
    const sym = Z3.mk_string_symbol(ctx, name);
    const decl = Z3.mk_func_decl(ctx, sym, [], sort);
    const app = Z3.mk_app(ctx, decl, []);
    const entry = { name, sym, decl, app };
    decls.push(entry);
    declByName.set(name, entry);
  }

  function parseTerm(termText) {
    const syms = decls.map(d => d.sym);
    const fds = decls.map(d => d.decl);
    const vec = Z3.parse_smtlib2_string(ctx, '(assert ' + termText + ')', [], [], syms, fds);
    const n = Z3.ast_vector_size(ctx, vec);
    if (n !== 1) throw new Error('expected a single term, got ' + n);
    return Z3.ast_vector_get(ctx, vec, 0);
  }

  function numeralText(ast) {
    const s = Z3.get_numeral_string(ctx, ast);
    if (s.startsWith('-')) return '(- ' + s.slice(1) + ')';
    return s;
  }

  async function handle(cmd) {
    const parts = tokenizeTopLevel(cmd);
    if (parts.length === 0) return;
    const head = parts[0];
    switch (head) {
      case 'set-logic':
        ok();
        break;
      case 'set-option': {
        const opt = parts[1];
        const val = parts[2];
        if (opt === ':print-success') { printSuccess = (val === 'true'); if (printSuccess) out('success'); }
        else if (opt === ':produce-unsat-cores') { produceCores = (val === 'true'); ok(); }
        else if (opt === ':timeout' || opt === ':rlimit') {
          const p = Z3.mk_params(ctx);
          Z3.params_inc_ref(ctx, p);
          Z3.params_set_uint(ctx, p, Z3.mk_string_symbol(ctx, opt.slice(1)), parseInt(val, 10) >>> 0);
          Z3.solver_set_params(ctx, solver, p);
          Z3.params_dec_ref(ctx, p);
          ok();
        } else ok();
        break;
      }
      case 'declare-const':
        declareConst(parts[1], parts[2]);
        ok();
        break;
      case 'declare-fun': {
        // Only zero-arity declarations occur in this protocol.
        const m = cmd.match(/\(declare-fun\s+(\S+)\s*\(\s*\)\s*(\S+)\s*\)/);
        if (!m) { err('unsupported declare-fun arity'); break; }
        declareConst(m[1], m[2]);
        ok();
        break;
      }
      case 'assert': {
        let body = cmd.trim().replace(/^\(assert/, '').replace(/\)\s*$/, '').trim();
        const named = body.match(/^\(!\s*([\s\S]*)\s+:named\s+([^\s()]+)\s*\)$/);
        if (named && produceCores) {
          const term = parseTerm(named[1]);
          const label = named[2];
          declareConst(label, 'Bool');
          const track = declByName.get(label).app;
          trackByAstId.set(Z3.get_ast_id(ctx, track), label);
          Z3.solver_assert_and_track(ctx, solver, term, track);
        } else {
          const text = named ? named[1] : body;
          Z3.solver_assert(ctx, solver, parseTerm(text));
        }
        ok();
        break;
      }
      case 'push': {
        const n = parts.length > 1 ? parseInt(parts[1], 10) : 1;
        for (let i = 0; i < n; i++) { scopeStack.push(decls.length); Z3.solver_push(ctx, solver); }
        ok();
        break;
      }
      case 'pop': {
        const n = parts.length > 1 ? parseInt(parts[1], 10) : 1;
        for (let i = 0; i < n; i++) {
          if (scopeStack.length === 0) throw new Error('pop without matching push');
          const sz = scopeStack.pop();
          Z3.solver_pop(ctx, solver, 1);
          while (decls.length > sz) {
            const d = decls.pop();
            declByName.delete(d.name);
          }
        }
        ok();
        break;
      }
      case 'check-sat': {
        const r = await Z3.solver_check(ctx, solver);
        lastCheck = r === 1 ? 'sat' : r === -1 ? 'unsat' : 'unknown';
        out(lastCheck);
        break;
      }
      case 'get-value': {
        const model = Z3.solver_get_model(ctx, solver);
        Z3.model_inc_ref(ctx, model);
        const names = tokenizeTopLevel(parts.slice(1).join(' '));
        const pieces = [];
        for (const name of names) {
          const entry = declByName.get(name);
          if (!entry) { pieces.push('(' + name + ' 0)'); continue; }
          const val = Z3.model_eval(ctx, model, entry.app, true);
          pieces.push('(' + name + ' ' + numeralText(val) + ')');
        }
        Z3.model_dec_ref(ctx, model);
        out('(' + pieces.join(' ') + ')');
        break;
      }
      case 'get-model': {
        const model = Z3.solver_get_model(ctx, solver);
        Z3.model_inc_ref(ctx, model);
        const pieces = [];
        for (const d of decls) {
          if (trackByAstId.has(Z3.get_ast_id(ctx, d.app))) continue;
          const val = Z3.model_eval(ctx, model, d.app, true);
          pieces.push('(define-fun ' + d.name + ' () Int ' + numeralText(val) + ')');
        }
        Z3.model_dec_ref(ctx, model);
        out('(' + pieces.join(' ') + ')');
        break;
      }
      case 'get-unsat-core': {
        const core = Z3.solver_get_unsat_core(ctx, solver);
        const n = Z3.ast_vector_size(ctx, core);
        const labels = [];
        for (let i = 0; i < n; i++) {
          const ast = Z3.ast_vector_get(ctx, core, i);
          const label = trackByAstId.get(Z3.get_ast_id(ctx, ast));
          if (label) labels.push(label);
        }
        out('(' + labels.join(' ') + ')');
        break;
      }
      case 'get-info': {
        if (parts[1] === ':reason-unknown') {
          const reason = lastCheck === 'unknown' ? Z3.solver_get_reason_unknown(ctx, solver) : '';
          out('(:reason-unknown "' + reason + '")');
        } else out('(:unsupported)');
        break;
      }
      case 'echo':
        out(parts.slice(1).join(' ').replace(/^"|"$/g, ''));
        break;
      case 'reset': {
        Z3.solver_dec_ref(ctx, solver);
        solver = Z3.mk_solver(ctx);
        Z3.solver_inc_ref(ctx, solver);
        decls = [];
        declByName = new Map();
        scopeStack = [];
        trackByAstId = new Map();
        produceCores = false;
        ok();
        break;
      }
      case 'reset-assertions':
        Z3.solver_reset(ctx, solver);
        scopeStack = [];
        ok();
        break;
      case 'exit':
        process.exit(0);
        break;
      default:
        err('unsupported command: ' + head);
    }
  }

  let buffer = '';
  let depth = 0;
  let inStr = false;
  let queue = Promise.resolve();

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', chunk => {
    for (const ch of chunk) {
      if (inStr) {
        buffer += ch;
        if (ch === '"') inStr = false;
        continue;
      }
      if (ch === '"') { inStr = true; buffer += ch; continue; }
      if (ch === '(') depth++;
      if (ch === ')') depth--;
      buffer += ch;
      if (depth === 0 && ch === ')') {
        const cmd = buffer.trim();
        buffer = '';
        if (cmd.length) {
          queue = queue.then(() => handle(cmd)).catch(e => err(e.message || e));
        }
      }
    }
  });
  process.stdin.on('end', () => { queue.then(() => process.exit(0)); });
}

main().catch(e => {
  process.stderr.write('shim failed to start: ' + (e.message || e) + '\n');
  process.exit(1);
});
