fn main() -> std::process::ExitCode {
    stable_area::cli::main()
}
