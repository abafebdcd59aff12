fn main() -> std::process::ExitCode {
    hetg_core::cli::main_entry()
}
