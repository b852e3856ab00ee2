fn main() -> std::process::ExitCode {
    typebounds::cli::main_entry()
}
